//! Solution pairs `(f, g)` of `g(xyz₀) = g(x)g(y) − f(x)f(y)`: the eight
//! parametrised families, residual checkers for the equation and its
//! relatives, and a classifier mapping an arbitrary solution back to the
//! families.

mod checks;
mod classify;
mod enumerate;
mod family;
mod psi;

pub use checks::{
    check_alpha_cosine, check_cosine, check_kannappan, check_lemma33_identities,
    check_multiplicative_kannappan, check_sine_kannappan, check_sine_law, extract_mu,
    kannappan_witness, lambda_roots, mu_residual, Lemma33Report,
};
pub use classify::{
    classify, ClassificationReport, Classifier, ClassifyError, FamilyMatch, ProofRoute,
};
pub use enumerate::{enumerate_all_families, GridConfig};
pub use family::{build_f6_unchecked, build_family, f6_chi_z0_targets, F6Variant, FamilySpec, Sign};
pub use psi::{build_psi, PsiFunction};

use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::characters::CharacterError;
use crate::scalar::{self, Scalar, Table};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolutionError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("domain mismatch: {0}")]
    DomainMismatch(&'static str),
    #[error("rho violates its compatibility conditions at element {0}")]
    InvalidRho(usize),
    #[error("A is not additive at ({0}, {1})")]
    InvalidAdditive(usize, usize),
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
    #[error("table has {found} entries, domain has {expected} elements")]
    LengthMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Character(#[from] CharacterError),
}

/// Value tables for `f` and `g` over a domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionPair {
    pub f: Table,
    pub g: Table,
}

impl SolutionPair {
    pub fn new(f: Table, g: Table) -> Self {
        SolutionPair { f, g }
    }

    pub fn zero(n: usize) -> Self {
        SolutionPair {
            f: scalar::zero_table(n),
            g: scalar::zero_table(n),
        }
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        scalar::table_is_exact(&self.f) && scalar::table_is_exact(&self.g)
    }

    pub fn to_float(&self) -> Self {
        SolutionPair {
            f: scalar::table_to_float(&self.f),
            g: scalar::table_to_float(&self.g),
        }
    }

    /// `(−f, g)`, which solves the equation whenever `(f, g)` does.
    pub fn negate_f(&self) -> Self {
        SolutionPair {
            f: self.f.iter().map(|v| -v).collect(),
            g: self.g.clone(),
        }
    }

    /// Largest modulus over both tables.
    pub fn max_abs(&self) -> f64 {
        scalar::max_abs(self.f.iter().chain(&self.g))
    }

    /// Largest pointwise modulus of the difference.
    pub fn distance(&self, other: &SolutionPair) -> f64 {
        self.f
            .iter()
            .zip(&other.f)
            .chain(self.g.iter().zip(&other.g))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// [`Self::distance`] scaled by `max(1, max |self|)`.
    pub fn relative_distance(&self, other: &SolutionPair) -> f64 {
        self.distance(other) / self.max_abs().max(1.0)
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<(), SolutionError> {
        for t in [&self.f, &self.g] {
            if t.len() != n {
                return Err(SolutionError::LengthMismatch {
                    expected: n,
                    found: t.len(),
                });
            }
        }
        Ok(())
    }
}

/// Pointwise `Σ cᵢ·tᵢ`.
pub(crate) fn combine(terms: &[(&Scalar, &[Scalar])]) -> Table {
    let n = terms.first().map_or(0, |t| t.1.len());
    (0..n)
        .map(|x| {
            terms
                .iter()
                .fold(Scalar::zero(), |acc, (c, t)| acc + *c * &t[x])
        })
        .collect()
}

/// Exact equality for exact tables, otherwise `max |a − b| ≤ tol·max(1, max |a|)`.
pub(crate) fn tables_match(a: &[Scalar], b: &[Scalar], tol: f64) -> bool {
    if scalar::table_is_exact(a) && scalar::table_is_exact(b) {
        return a == b;
    }
    let scale = scalar::max_abs(a).max(1.0);
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * scale)
}

pub(crate) fn scaled(t: &[Scalar], c: &Scalar) -> Table {
    t.iter().map(|v| v * c).collect()
}

pub(crate) fn tables_differ(a: &[Scalar], b: &[Scalar]) -> bool {
    !tables_match(a, b, crate::tol::FIT)
}

