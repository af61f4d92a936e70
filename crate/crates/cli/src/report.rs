//! Report documents emitted by the commands, and their text rendering.

use std::fmt::Write as _;

use kannappan_core::oracle::{CoverageReport, Outcome};
use kannappan_core::solutions::{ClassificationReport, FamilySpec};
use kannappan_core::{DomainKind, ElementSubset, Scalar, SemigroupDomain, SolutionPair, Table};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct DomainInfo {
    pub backend: &'static str,
    pub n: usize,
    pub z0: String,
    pub labels: Vec<String>,
}

impl DomainInfo {
    pub fn new(d: &SemigroupDomain) -> Self {
        DomainInfo {
            backend: match d.kind() {
                DomainKind::FiniteTable { .. } => "finite",
                DomainKind::NaturalsWindow { .. } => "naturals-window",
            },
            n: d.len(),
            z0: d.label(d.z0()),
            labels: d.elements().map(|x| d.label(x)).collect(),
        }
    }
}

pub fn labels_of(d: &SemigroupDomain, s: &ElementSubset) -> Vec<String> {
    s.iter().map(|x| d.label(x)).collect()
}

#[derive(Debug, Serialize)]
pub struct CharacterEntry {
    pub index: usize,
    pub values: Table,
    pub nullspace: Vec<String>,
    pub nullspace_square: Vec<String>,
    pub p_set: Vec<String>,
    pub additive_basis: Vec<Table>,
    pub rho_basis: Vec<Table>,
}

#[derive(Debug, Serialize)]
pub struct CharactersReport {
    pub command: &'static str,
    pub domain: DomainInfo,
    /// Set on the window backend, where characters form a continuum.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parametric: Option<String>,
    pub characters: Vec<CharacterEntry>,
    pub additive_basis: Vec<Table>,
}

#[derive(Debug, Serialize)]
pub struct SolveEntry {
    pub family: &'static str,
    pub spec: FamilySpec,
    pub f: Table,
    pub g: Table,
    pub residual: f64,
}

#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub command: &'static str,
    pub domain: DomainInfo,
    pub count: usize,
    pub families: Vec<&'static str>,
    pub solutions: Vec<SolveEntry>,
}

#[derive(Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ClassifyStatus {
    Classified {
        family: &'static str,
        families: Vec<&'static str>,
        report: ClassificationReport,
    },
    Unclassified {
        report: ClassificationReport,
    },
    ResidualTooLarge {
        residual: f64,
        x: String,
        y: String,
    },
}

#[derive(Debug, Serialize)]
pub struct ClassifyReport {
    pub command: &'static str,
    pub domain: DomainInfo,
    pub pair: SolutionPair,
    pub residual: f64,
    pub result: ClassifyStatus,
}

#[derive(Debug, Serialize)]
pub struct VerifyOptions {
    pub starts: usize,
    pub seed: u64,
    pub tolerance: f64,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub command: &'static str,
    pub domain: DomainInfo,
    pub options: VerifyOptions,
    pub passed: bool,
    pub coverage: CoverageReport,
}

fn table(t: &[Scalar]) -> String {
    let cells: Vec<String> = t.iter().map(|v| v.to_string()).collect();
    format!("[{}]", cells.join(", "))
}

fn set(s: &[String]) -> String {
    format!("{{{}}}", s.join(", "))
}

fn count(n: usize, noun: &str) -> String {
    format!("{n} {noun}{}", if n == 1 { "" } else { "s" })
}

fn header(out: &mut String, d: &DomainInfo) {
    let _ = writeln!(out, "domain: {} with {}, z0 = {}", d.backend, count(d.n, "element"), d.z0);
}

pub trait Render {
    fn text(&self) -> String;
}

impl Render for CharactersReport {
    fn text(&self) -> String {
        let mut out = String::new();
        header(&mut out, &self.domain);
        if let Some(p) = &self.parametric {
            let _ = writeln!(out, "characters: {p}");
        } else {
            let _ = writeln!(out, "{}", count(self.characters.len(), "character"));
        }
        for c in &self.characters {
            let _ = writeln!(out, "chi[{}] = {}", c.index, table(&c.values));
            let _ = writeln!(
                out,
                "  nullspace {}  square {}  P {}",
                set(&c.nullspace),
                set(&c.nullspace_square),
                set(&c.p_set)
            );
            let _ = writeln!(
                out,
                "  additive dimension {}  rho dimension {}",
                c.additive_basis.len(),
                c.rho_basis.len()
            );
            for r in &c.rho_basis {
                let _ = writeln!(out, "  rho {}", table(r));
            }
        }
        for a in &self.additive_basis {
            let _ = writeln!(out, "additive {}", table(a));
        }
        out
    }
}

impl Render for SolveReport {
    fn text(&self) -> String {
        let mut out = String::new();
        header(&mut out, &self.domain);
        let _ = writeln!(out, "{}", count(self.count, "solution"));
        for s in &self.solutions {
            let _ = writeln!(
                out,
                "{}  f = {}  g = {}  residual {}",
                s.family,
                table(&s.f),
                table(&s.g),
                s.residual
            );
        }
        out
    }
}

impl Render for ClassifyReport {
    fn text(&self) -> String {
        let mut out = String::new();
        header(&mut out, &self.domain);
        let _ = writeln!(out, "residual {:.3e}", self.residual);
        match &self.result {
            ClassifyStatus::Classified { family, families, report } => {
                let m = &report.matches[0];
                let _ = writeln!(out, "classified: {family} (rebuild error {:.3e})", m.rebuild_error);
                if families.len() > 1 {
                    let _ = writeln!(out, "also matches: {}", families[1..].join(", "));
                }
                let _ = writeln!(out, "parameters: {}", serde_json::to_string(&m.spec).unwrap_or_default());
            }
            ClassifyStatus::Unclassified { report } => {
                let _ = writeln!(out, "UNCLASSIFIED: no family reproduces this solution");
                let _ = writeln!(out, "route: {}", serde_json::to_string(&report.route).unwrap_or_default());
            }
            ClassifyStatus::ResidualTooLarge { residual, x, y } => {
                let _ = writeln!(out, "not a solution: residual {residual:.3e} at x = {x}, y = {y}");
            }
        }
        out
    }
}

impl Render for VerifyReport {
    fn text(&self) -> String {
        let mut out = String::new();
        let c = &self.coverage;
        header(&mut out, &self.domain);
        let _ = writeln!(out, "starts {}  seed {}", self.options.starts, self.options.seed);
        if let Some(t) = &c.telemetry {
            let _ = writeln!(out, "converged {}  distinct {}", t.converged, t.distinct);
            if let Some(w) = &t.warning {
                let _ = writeln!(out, "warning: {w}");
            }
        }
        let _ = writeln!(out, "classified {}  unclassified {}", c.classified, c.unclassified);
        for cl in &c.clusters {
            let chars: Vec<String> = cl
                .character_indices
                .iter()
                .map(|i| i.map_or("?".into(), |i| i.to_string()))
                .collect();
            let _ = writeln!(
                out,
                "  {} chars [{}]  members {}  max rebuild {:.1e}",
                cl.family,
                chars.join(", "),
                cl.members,
                cl.max_rebuild_error
            );
        }
        for (k, e) in c.entries.iter().enumerate() {
            if let Outcome::Unclassified { near_miss, .. } = &e.outcome {
                let hint = near_miss
                    .as_ref()
                    .map(|m| format!(" (nearest {} at {:.1e})", m.family, m.rebuild_error))
                    .unwrap_or_default();
                let _ = writeln!(out, "  unclassified #{k}: f = {} g = {}{hint}", table(&e.pair.f), table(&e.pair.g));
            }
        }
        let _ = writeln!(out, "{}", c.verdict);
        out
    }
}
