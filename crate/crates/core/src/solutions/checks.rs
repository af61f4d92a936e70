use serde::{Deserialize, Serialize};

use super::{SolutionError, SolutionPair};
use crate::characters::check_linear_independence;
use crate::scalar::Scalar;
use crate::semigroup::SemigroupDomain;
use crate::tol;

fn max_over(residuals: impl Iterator<Item = Scalar>) -> f64 {
    residuals.map(|r| r.abs()).fold(0.0, f64::max)
}

fn kannappan_terms<'a>(
    domain: &'a SemigroupDomain,
    pair: &'a SolutionPair,
) -> impl Iterator<Item = (usize, usize, Scalar)> + 'a {
    let (f, g) = (&pair.f, &pair.g);
    domain.defined_pairs().filter_map(move |(x, y, _)| {
        domain
            .compose_z0(x, y)
            .map(|xyz| (x, y, &g[xyz] - &(&g[x] * &g[y]) + &f[x] * &f[y]))
    })
}

/// Max over defined pairs of `|g(xyz₀) − g(x)g(y) + f(x)f(y)|`. Exactly 0.0
/// for an exact solution; any exact nonzero residual reports a positive value.
pub fn check_kannappan(domain: &SemigroupDomain, pair: &SolutionPair) -> f64 {
    max_over(kannappan_terms(domain, pair).map(|t| t.2))
}

/// The pair `(x, y)` with the largest residual and that residual, if any
/// pair exceeds `tol`.
pub fn kannappan_witness(domain: &SemigroupDomain, pair: &SolutionPair, tol: f64) -> Option<(usize, usize, f64)> {
    kannappan_terms(domain, pair)
        .map(|(x, y, r)| (x, y, r.abs()))
        .filter(|t| t.2 > tol)
        .max_by(|a, b| a.2.total_cmp(&b.2))
}

/// Residual of `h(xyz₀) = h(x)h(y)`.
pub fn check_multiplicative_kannappan(domain: &SemigroupDomain, h: &[Scalar]) -> f64 {
    max_over(domain.defined_pairs().filter_map(|(x, y, _)| {
        domain.compose_z0(x, y).map(|xyz| &h[xyz] - &(&h[x] * &h[y]))
    }))
}

/// Residual of `f(xyz₀) = χ(z₀)f(x)χ(y) + χ(z₀)f(y)χ(x)`.
pub fn check_sine_kannappan(domain: &SemigroupDomain, f: &[Scalar], chi: &[Scalar]) -> Result<f64, SolutionError> {
    let cz = &chi[domain.z0()];
    if cz.approx_zero(tol::RESIDUAL) {
        return Err(SolutionError::PreconditionViolated("chi(z0) = 0"));
    }
    Ok(max_over(domain.defined_pairs().filter_map(|(x, y, _)| {
        domain.compose_z0(x, y).map(|xyz| {
            let rhs = cz * &(&f[x] * &chi[y] + &f[y] * &chi[x]);
            &f[xyz] - &rhs
        })
    })))
}

/// Residual of the sine addition law `Ψ(xy) = Ψ(x)χ(y) + Ψ(y)χ(x)`.
pub fn check_sine_law(domain: &SemigroupDomain, psi: &[Scalar], chi: &[Scalar]) -> f64 {
    max_over(
        domain
            .defined_pairs()
            .map(|(x, y, xy)| &psi[xy] - &(&psi[x] * &chi[y] + &psi[y] * &chi[x])),
    )
}

/// Residual of the cosine addition law `g(xy) = g(x)g(y) − f(x)f(y)`.
pub fn check_cosine(domain: &SemigroupDomain, pair: &SolutionPair) -> f64 {
    check_alpha_cosine(domain, pair, &Scalar::zero())
}

/// Residual of `g(xy) = g(x)g(y) − f(y)f(x) + αf(xy)`.
pub fn check_alpha_cosine(domain: &SemigroupDomain, pair: &SolutionPair, alpha: &Scalar) -> f64 {
    let (f, g) = (&pair.f, &pair.g);
    max_over(domain.defined_pairs().map(|(x, y, xy)| {
        let rhs = &g[x] * &g[y] - &f[y] * &f[x] + alpha * &f[xy];
        &g[xy] - &rhs
    }))
}

/// The `μ` of `f(xyz₀) = f(x)g(y) + f(y)g(x) + μf(x)f(y)`, solved from the
/// defined pair with the largest `|f(x)f(y)|`. `Ok(None)` when no such pair
/// has `f(x)f(y) ≠ 0`. Use [`mu_residual`] to check it over all pairs.
pub fn extract_mu(domain: &SemigroupDomain, pair: &SolutionPair) -> Result<Option<Scalar>, SolutionError> {
    let (f, g) = (&pair.f, &pair.g);
    if f[domain.z0()].approx_zero(tol::RESIDUAL) {
        return Err(SolutionError::PreconditionViolated("f(z0) = 0"));
    }
    let best = domain
        .defined_pairs()
        .filter_map(|(x, y, _)| domain.compose_z0(x, y).map(|xyz| (x, y, xyz, (&f[x] * &f[y]).abs())))
        .filter(|t| t.3 > 0.0)
        .max_by(|a, b| a.3.total_cmp(&b.3));
    Ok(best.map(|(x, y, xyz, _)| {
        let ff = &f[x] * &f[y];
        let num = &f[xyz] - &(&f[x] * &g[y]) - &f[y] * &g[x];
        &num / &ff
    }))
}

/// Residual of `f(xyz₀) = f(x)g(y) + f(y)g(x) + μf(x)f(y)`.
pub fn mu_residual(domain: &SemigroupDomain, pair: &SolutionPair, mu: &Scalar) -> f64 {
    let (f, g) = (&pair.f, &pair.g);
    max_over(domain.defined_pairs().filter_map(|(x, y, _)| {
        domain.compose_z0(x, y).map(|xyz| {
            let rhs = &f[x] * &g[y] + &f[y] * &g[x] + mu * &(&f[x] * &f[y]);
            &f[xyz] - &rhs
        })
    }))
}

/// Roots of `λ² + μλ + 1`, with the `+` branch of the square root first.
pub fn lambda_roots(mu: &Scalar) -> (Scalar, Scalar) {
    let disc = mu * mu - Scalar::from_i64(4);
    let root = disc.sqrt();
    let half = Scalar::from_ratio(1, 2);
    let l1 = &(&root - mu) * &half;
    let l2 = &(-&root - mu) * &half;
    (l1, l2)
}

/// Identities that hold for every solution with `f(z₀) = 0`, and the `μ`
/// relation for solutions with `f(z₀) ≠ 0`. `None` marks an identity that
/// does not apply to the pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma33Report {
    pub kannappan: f64,
    /// `g(z₀²)g(xy) = g(z₀)[g(x)g(y) − f(x)f(y)] + f(z₀²)f(xy)`
    pub product_identity: Option<f64>,
    /// `g(z₀²)² = g(z₀)³ + f(z₀²)²`
    pub square_identity: Option<f64>,
    /// `g(z₀) ≠ 0` for linearly independent `f, g`.
    pub g_z0_nonzero: Option<bool>,
    pub mu: Option<Scalar>,
    pub mu_residual: Option<f64>,
}

pub fn check_lemma33_identities(domain: &SemigroupDomain, pair: &SolutionPair) -> Lemma33Report {
    let (f, g) = (&pair.f, &pair.g);
    let z0 = domain.z0();
    let mut report = Lemma33Report {
        kannappan: check_kannappan(domain, pair),
        product_identity: None,
        square_identity: None,
        g_z0_nonzero: None,
        mu: None,
        mu_residual: None,
    };
    if f[z0].approx_zero(tol::RESIDUAL) {
        if let Some(zz) = domain.z0_squared() {
            let (gzz, fzz, gz) = (&g[zz], &f[zz], &g[z0]);
            report.product_identity = Some(max_over(domain.defined_pairs().map(|(x, y, xy)| {
                let rhs = gz * &(&g[x] * &g[y] - &f[x] * &f[y]) + fzz * &f[xy];
                gzz * &g[xy] - rhs
            })));
            report.square_identity = Some((gzz * gzz - (gz * gz * gz + fzz * fzz)).abs());
        }
        if check_linear_independence(&[f.clone(), g.clone()]) {
            report.g_z0_nonzero = Some(!g[z0].approx_zero(tol::RESIDUAL));
        }
    } else if let Ok(Some(mu)) = extract_mu(domain, pair) {
        report.mu_residual = Some(mu_residual(domain, pair, &mu));
        report.mu = Some(mu);
    }
    report
}
