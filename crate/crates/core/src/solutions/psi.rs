use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{check_sine_law, SolutionError};
use crate::characters::{self, AdditiveFunction, CharacterFunction, RhoFunction};
use crate::scalar::{Scalar, Table};
use crate::semigroup::SemigroupDomain;
use crate::tol;

/// `χA` on `S ∖ I_χ`, `ρ` on `P_χ`, zero on `I_χ ∖ P_χ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiFunction {
    pub values: Table,
}

/// Assemble `Ψ` from its pieces. The result satisfies the sine addition law
/// `Ψ(xy) = Ψ(x)χ(y) + Ψ(y)χ(x)` on every defined pair.
pub fn build_psi(
    domain: &SemigroupDomain,
    chi: &CharacterFunction,
    additive: &AdditiveFunction,
    rho: &RhoFunction,
) -> Result<PsiFunction, SolutionError> {
    build_psi_with_tol(domain, chi, additive, rho, tol::FIT)
}

pub(crate) fn build_psi_with_tol(
    domain: &SemigroupDomain,
    chi: &CharacterFunction,
    additive: &AdditiveFunction,
    rho: &RhoFunction,
    tol: f64,
) -> Result<PsiFunction, SolutionError> {
    let n = domain.len();
    for t in [&additive.values, &rho.values] {
        if t.len() != n {
            return Err(SolutionError::LengthMismatch {
                expected: n,
                found: t.len(),
            });
        }
    }
    let additive = AdditiveFunction {
        values: additive.values.clone(),
        carrier: chi.carrier(),
    };
    if let Some((x, y)) = additive.additivity_witness(domain, tol) {
        return Err(SolutionError::InvalidAdditive(x, y));
    }
    if let Some(p) = characters::rho_violation(domain, chi, rho, tol) {
        return Err(SolutionError::InvalidRho(p));
    }
    let values: Vec<Scalar> = domain
        .elements()
        .map(|x| {
            if !chi.nullspace.contains(x) {
                &chi.values[x] * &additive.values[x]
            } else if chi.p_set.contains(x) {
                rho.values[x].clone()
            } else {
                Scalar::zero()
            }
        })
        .collect();
    let psi = PsiFunction { values };
    let scale = crate::scalar::max_abs(&psi.values).max(1.0);
    if check_sine_law(domain, &psi.values, &chi.values) > tol * scale {
        return Err(SolutionError::PreconditionViolated(
            "sine addition law fails for the assembled function",
        ));
    }
    Ok(psi)
}
