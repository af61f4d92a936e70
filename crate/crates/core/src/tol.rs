//! Default tolerances for the floating-point path. The exact path compares
//! with exact equality and ignores these.

/// Residual gate for checked identities.
pub const RESIDUAL: f64 = 1e-10;
/// Parameter fitting and rebuild comparison.
pub const FIT: f64 = 1e-8;
/// Relative singular-value cut-off for numeric rank.
pub const RANK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerance {
    pub residual: f64,
    pub fit: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            residual: RESIDUAL,
            fit: FIT,
        }
    }
}
