use std::path::Path;

use anyhow::{bail, Context, Result};
use kannappan_core::characters::{additive_basis, enumerate_characters, rho_space};
use kannappan_core::oracle::{default_starts, verify_domain, SolveOptions};
use kannappan_core::solutions::{check_kannappan, enumerate_all_families, kannappan_witness, Classifier, ClassifyError, GridConfig};
use kannappan_core::{SemigroupDomain, Tolerance};
use serde::Serialize;

use crate::input;
use crate::report::*;
use crate::{Backend, Common, Format};

/// Exit status for a completeness failure.
const COVERAGE_FAILURE: u8 = 2;

fn load_domain(c: &Common) -> Result<SemigroupDomain> {
    // also rejects NaN
    if c.tolerance.is_nan() || c.tolerance <= 0.0 {
        bail!("--tolerance must be positive");
    }
    match c.backend {
        Backend::Finite => {
            let path = c.input.as_deref().context("a Cayley table file is required")?;
            let text = input::read(path)?;
            let file = input::parse_cayley(&path.display().to_string(), &text)?;
            Ok(file.into_domain(c.z0)?)
        }
        Backend::NaturalsWindow => {
            if c.input.is_some() {
                bail!("the naturals-window backend takes no table file");
            }
            let window = c.window.context("--window is required with the naturals-window backend")?;
            Ok(SemigroupDomain::naturals_window(window, c.z0.unwrap_or(1))?)
        }
    }
}

fn tolerance(c: &Common) -> Tolerance {
    Tolerance {
        residual: c.tolerance,
        ..Tolerance::default()
    }
}

fn emit<T: Serialize + Render>(c: &Common, report: &T) -> Result<()> {
    let body = match c.format {
        Format::Json => serde_json::to_string_pretty(report)? + "\n",
        Format::Text => report.text(),
    };
    match &c.out {
        Some(path) => std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{body}"),
    }
    Ok(())
}

pub fn characters(c: &Common) -> Result<u8> {
    let d = load_domain(c)?;
    let report = if d.is_finite_table() {
        let mut entries = Vec::new();
        for (index, chi) in enumerate_characters(&d)?.into_iter().enumerate() {
            entries.push(CharacterEntry {
                index,
                additive_basis: additive_basis(&d, Some(&chi))
                    .map(|b| b.into_iter().map(|a| a.values).collect())
                    .unwrap_or_default(),
                rho_basis: rho_space(&d, &chi).into_iter().map(|r| r.values).collect(),
                nullspace: labels_of(&d, &chi.nullspace),
                nullspace_square: labels_of(&d, &chi.nullspace_square),
                p_set: labels_of(&d, &chi.p_set),
                values: chi.values,
            });
        }
        CharactersReport {
            command: "characters",
            domain: DomainInfo::new(&d),
            parametric: None,
            characters: entries,
            additive_basis: Vec::new(),
        }
    } else {
        CharactersReport {
            command: "characters",
            domain: DomainInfo::new(&d),
            parametric: Some("x -> a^x for every nonzero complex a; null sets are empty".into()),
            characters: Vec::new(),
            additive_basis: additive_basis(&d, None)?.into_iter().map(|a| a.values).collect(),
        }
    };
    emit(c, &report)?;
    Ok(0)
}

pub fn solve(c: &Common) -> Result<u8> {
    let d = load_domain(c)?;
    if !d.is_finite_table() {
        bail!("solve enumerates characters and needs a finite table");
    }
    let mut grid = GridConfig {
        seed: c.seed,
        ..GridConfig::default()
    };
    input::apply_grid(&mut grid, &c.grid).map_err(anyhow::Error::msg)?;
    let solutions: Vec<SolveEntry> = enumerate_all_families(&d, &grid)?
        .into_iter()
        .map(|(spec, pair)| SolveEntry {
            family: spec.tag(),
            residual: check_kannappan(&d, &pair),
            spec,
            f: pair.f,
            g: pair.g,
        })
        .collect();
    let mut families: Vec<&'static str> = solutions.iter().map(|s| s.family).collect();
    families.dedup();
    let report = SolveReport {
        command: "solve",
        domain: DomainInfo::new(&d),
        count: solutions.len(),
        families,
        solutions,
    };
    emit(c, &report)?;
    Ok(0)
}

pub fn classify(c: &Common, pair_path: &Path) -> Result<u8> {
    let d = load_domain(c)?;
    let text = input::read(pair_path)?;
    let pair = input::parse_pair(&pair_path.display().to_string(), &text, d.len())?;
    let residual = check_kannappan(&d, &pair);
    let classifier = Classifier::new(&d, tolerance(c))?;
    let (result, code) = match classifier.classify(&pair) {
        Ok(report) => {
            let families = report.tags();
            (
                ClassifyStatus::Classified {
                    family: families[0],
                    families,
                    report,
                },
                0,
            )
        }
        Err(ClassifyError::Unclassified(report)) => (ClassifyStatus::Unclassified { report: *report }, COVERAGE_FAILURE),
        Err(ClassifyError::ResidualTooLarge { .. }) => {
            let (x, y, residual) = kannappan_witness(&d, &pair, 0.0).expect("a witness exists above the gate");
            eprintln!("error: not a solution, residual {residual:.3e} at ({}, {})", d.label(x), d.label(y));
            let status = ClassifyStatus::ResidualTooLarge {
                residual,
                x: d.label(x),
                y: d.label(y),
            };
            (status, 1)
        }
        Err(ClassifyError::Solution(e)) => return Err(e.into()),
    };
    let report = ClassifyReport {
        command: "classify",
        domain: DomainInfo::new(&d),
        pair,
        residual,
        result,
    };
    emit(c, &report)?;
    Ok(code)
}

pub fn verify_theorem(c: &Common) -> Result<u8> {
    let d = load_domain(c)?;
    if c.starts == Some(0) {
        bail!("--starts must be at least 1");
    }
    let starts = c.starts.unwrap_or_else(|| default_starts(d.len()));
    let opts = SolveOptions {
        starts: Some(starts),
        seed: c.seed,
        tol: c.tolerance,
        ..SolveOptions::default()
    };
    let coverage = verify_domain(&d, &opts, tolerance(c))?;
    let passed = coverage.passed();
    if !passed {
        eprintln!("coverage failure: {}", coverage.verdict);
    }
    let report = VerifyReport {
        command: "verify-theorem",
        domain: DomainInfo::new(&d),
        options: VerifyOptions {
            starts,
            seed: c.seed,
            tolerance: c.tolerance,
        },
        passed,
        coverage,
    };
    emit(c, &report)?;
    Ok(if passed { 0 } else { COVERAGE_FAILURE })
}
