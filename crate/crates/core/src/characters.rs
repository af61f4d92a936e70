//! Multiplicative functions (characters), their nullspace decomposition
//! `I_χ`, `I_χ²`, `P_χ`, and the linear spaces of additive functions and of
//! admissible restrictions `ρ: P_χ → ℂ`.

use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::scalar::{Scalar, Table};
use crate::semigroup::{ElementSubset, SemigroupDomain};
use crate::tol;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CharacterError {
    #[error("character enumeration needs a finite Cayley table")]
    BackendUnsupported,
    #[error("value table has {found} entries, domain has {expected} elements")]
    LengthMismatch { expected: usize, found: usize },
    #[error("not multiplicative at ({x}, {y})")]
    NotMultiplicative { x: usize, y: usize },
    #[error("the zero function is not a character")]
    ZeroFunction,
    #[error("S \\ I_chi is empty")]
    EmptyCarrier,
    #[error("window characters need a nonzero base")]
    ZeroBase,
}

/// A nonzero multiplicative function with its nullspace decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterFunction {
    /// Position in the domain's enumerated character list, when known.
    pub index: Option<usize>,
    pub values: Table,
    /// `I_χ`
    pub nullspace: ElementSubset,
    /// `I_χ²`
    pub nullspace_square: ElementSubset,
    /// `P_χ`
    pub p_set: ElementSubset,
}

impl CharacterFunction {
    /// Wrap a value table after checking that it is a nonzero character.
    pub fn new(domain: &SemigroupDomain, values: Table) -> Result<Self, CharacterError> {
        if values.len() != domain.len() {
            return Err(CharacterError::LengthMismatch {
                expected: domain.len(),
                found: values.len(),
            });
        }
        if values.iter().all(|v| v.approx_zero(tol::RESIDUAL)) {
            return Err(CharacterError::ZeroFunction);
        }
        if let Some((x, y)) = multiplicativity_witness(domain, &values, tol::RESIDUAL) {
            return Err(CharacterError::NotMultiplicative { x, y });
        }
        let (nullspace, nullspace_square, p_set) = nullspace_sets(domain, &values);
        Ok(CharacterFunction {
            index: None,
            values,
            nullspace,
            nullspace_square,
            p_set,
        })
    }

    /// `x ↦ aˣ` on a naturals window; every character there has this form.
    pub fn exponential(domain: &SemigroupDomain, base: Scalar) -> Result<Self, CharacterError> {
        if base.is_zero() {
            return Err(CharacterError::ZeroBase);
        }
        let values = domain.elements().map(|x| base.pow(x as u32 + 1)).collect();
        Self::new(domain, values)
    }

    pub fn at(&self, x: usize) -> &Scalar {
        &self.values[x]
    }

    /// `S ∖ I_χ`.
    pub fn carrier(&self) -> ElementSubset {
        self.nullspace.complement()
    }

    /// `I_χ ∖ P_χ`.
    pub fn null_not_p(&self) -> ElementSubset {
        self.nullspace.difference(&self.p_set)
    }

    pub fn with_index(mut self, index: usize) -> Self {
        self.index = Some(index);
        self
    }

    pub fn is_exact(&self) -> bool {
        self.values.iter().all(Scalar::is_exact)
    }
}

/// First pair violating `χ(xy) = χ(x)χ(y)`, if any.
pub fn multiplicativity_witness(
    domain: &SemigroupDomain,
    values: &[Scalar],
    tol: f64,
) -> Option<(usize, usize)> {
    domain
        .defined_pairs()
        .find(|&(x, y, xy)| !values[xy].close_to(&(&values[x] * &values[y]), tol))
        .map(|(x, y, _)| (x, y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Val {
    Zero,
    Root(u32),
}

fn val_mul(a: Val, b: Val, l: u32) -> Val {
    match (a, b) {
        (Val::Root(i), Val::Root(j)) => Val::Root((i + j) % l),
        _ => Val::Zero,
    }
}

/// Order `L` of the roots of unity a character of `domain` can take: the lcm
/// of the periods of all power sequences.
pub fn value_order(domain: &SemigroupDomain) -> Option<u32> {
    domain
        .elements()
        .map(|x| domain.power_period(x).map(|p| p as u32))
        .try_fold(1u32, |acc, p| p.map(|p| acc.lcm(&p)))
}

/// Every nonzero character of a finite domain, each exactly once, in a
/// fixed canonical order (trivial character first).
///
/// Each value is 0 or an `L`-th root of unity, where `L` is
/// [`value_order`]; the search backtracks over those values and propagates
/// `χ(xy) = χ(x)χ(y)` through the Cayley table.
pub fn enumerate_characters(domain: &SemigroupDomain) -> Result<Vec<CharacterFunction>, CharacterError> {
    let l = value_order(domain).ok_or(CharacterError::BackendUnsupported)?;
    let n = domain.len();
    let periods: Vec<u32> = domain
        .elements()
        .map(|x| domain.power_period(x).expect("finite") as u32)
        .collect();
    let mut found = Vec::new();
    search(domain, l, &periods, vec![None; n], &mut found);
    let mut out = Vec::new();
    for vals in found {
        if vals.iter().all(|v| *v == Val::Zero) {
            continue;
        }
        let table: Table = vals
            .iter()
            .map(|v| match v {
                Val::Zero => Scalar::zero(),
                Val::Root(k) => Scalar::root_of_unity(l, *k as i64),
            })
            .collect();
        let idx = out.len();
        out.push(CharacterFunction::new(domain, table)?.with_index(idx));
    }
    Ok(out)
}

fn propagate(domain: &SemigroupDomain, l: u32, vals: &mut [Option<Val>]) -> bool {
    loop {
        let mut changed = false;
        for (x, y, xy) in domain.defined_pairs() {
            let (Some(a), Some(b)) = (vals[x], vals[y]) else {
                continue;
            };
            let p = val_mul(a, b, l);
            match vals[xy] {
                None => {
                    vals[xy] = Some(p);
                    changed = true;
                }
                Some(v) if v != p => return false,
                Some(_) => {}
            }
        }
        if !changed {
            return true;
        }
    }
}

fn search(
    domain: &SemigroupDomain,
    l: u32,
    periods: &[u32],
    vals: Vec<Option<Val>>,
    out: &mut Vec<Vec<Val>>,
) {
    let Some(x) = vals.iter().position(Option::is_none) else {
        out.push(vals.into_iter().map(|v| v.expect("assigned")).collect());
        return;
    };
    // χ(x)^p = 1 for the period p of x, so the exponent is a multiple of L/p
    let step = l / periods[x];
    let candidates = (0..periods[x])
        .map(|k| Val::Root(k * step))
        .chain(core::iter::once(Val::Zero));
    for c in candidates {
        let mut next = vals.clone();
        next[x] = Some(c);
        if propagate(domain, l, &mut next) {
            search(domain, l, periods, next, out);
        }
    }
}

/// `(I_χ, I_χ², P_χ)` for a value table.
pub fn nullspace_sets(
    domain: &SemigroupDomain,
    values: &[Scalar],
) -> (ElementSubset, ElementSubset, ElementSubset) {
    let n = domain.len();
    let null = ElementSubset::from_fn(n, |x| values[x].approx_zero(tol::RESIDUAL));
    let null_sq = domain.product_set(&null);
    let core = null.difference(&null_sq);
    let carrier = null.complement();
    let in_core = |x: Option<usize>| x.is_none_or(|x| core.contains(x));
    let p_set = ElementSubset::from_fn(n, |p| {
        core.contains(p)
            && carrier.iter().all(|u| {
                in_core(domain.compose(u, p))
                    && in_core(domain.compose(p, u))
                    && carrier.iter().all(|v| {
                        in_core(domain.compose(u, p).and_then(|up| domain.compose(up, v)))
                    })
            })
    });
    (null, null_sq, p_set)
}

/// An additive function on `S ∖ I_χ`, stored as a full table that is zero
/// off the carrier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditiveFunction {
    pub values: Table,
    pub carrier: ElementSubset,
}

impl AdditiveFunction {
    pub fn zero(carrier: ElementSubset) -> Self {
        AdditiveFunction {
            values: vec![Scalar::zero(); carrier.universe()],
            carrier,
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Self {
        AdditiveFunction {
            values: self.values.iter().map(|v| v * c).collect(),
            carrier: self.carrier.clone(),
        }
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.approx_zero(tol))
    }

    /// First pair on the carrier violating `A(xy) = A(x) + A(y)`.
    pub fn additivity_witness(&self, domain: &SemigroupDomain, tol: f64) -> Option<(usize, usize)> {
        domain
            .defined_pairs()
            .filter(|&(x, y, _)| self.carrier.contains(x) && self.carrier.contains(y))
            .find(|&(x, y, xy)| !self.values[xy].close_to(&(&self.values[x] + &self.values[y]), tol))
            .map(|(x, y, _)| (x, y))
    }
}

/// Basis of the additive functions on `S ∖ I_χ` (all of `S` when `chi` is
/// `None`), by exact rational elimination.
pub fn additive_basis(
    domain: &SemigroupDomain,
    chi: Option<&CharacterFunction>,
) -> Result<Vec<AdditiveFunction>, CharacterError> {
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    let carrier = chi.map_or_else(|| domain.full_set(), CharacterFunction::carrier);
    if carrier.is_empty() {
        return Err(CharacterError::EmptyCarrier);
    }
    let cols = carrier.indices();
    let col_of = |x: usize| cols.iter().position(|&c| c == x);
    let mut rows = Vec::new();
    for (x, y, xy) in domain.defined_pairs() {
        let (Some(cx), Some(cy), Some(cxy)) = (col_of(x), col_of(y), col_of(xy)) else {
            continue;
        };
        let mut row = vec![BigRational::zero(); cols.len()];
        row[cxy] += BigRational::one();
        row[cx] -= BigRational::one();
        row[cy] -= BigRational::one();
        rows.push(row);
    }
    let basis = linalg::rational_nullspace(&rows, cols.len());
    Ok(basis
        .into_iter()
        .map(|v| {
            let lead = v.iter().find(|q| !q.is_zero()).cloned().expect("nonzero basis vector");
            let mut values = vec![Scalar::zero(); domain.len()];
            for (k, q) in v.into_iter().enumerate() {
                values[cols[k]] = Scalar::from_rational(q / &lead);
            }
            AdditiveFunction {
                values,
                carrier: carrier.clone(),
            }
        })
        .collect())
}

/// A function on `P_χ`, stored as a full table that is zero off `P_χ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoFunction {
    pub values: Table,
    pub support: ElementSubset,
}

impl RhoFunction {
    pub fn zero(chi: &CharacterFunction) -> Self {
        RhoFunction {
            values: vec![Scalar::zero(); chi.values.len()],
            support: chi.p_set.clone(),
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Self {
        RhoFunction {
            values: self.values.iter().map(|v| v * c).collect(),
            support: self.support.clone(),
        }
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.approx_zero(tol))
    }
}

/// Linear constraints on `ρ`, one row per constraint over the columns
/// `P_χ` (in index order).
fn rho_constraints(domain: &SemigroupDomain, chi: &CharacterFunction) -> Vec<Vec<Scalar>> {
    let p = chi.p_set.indices();
    let col_of = |x: usize| p.iter().position(|&c| c == x);
    let carrier = chi.carrier();
    let mut rows = Vec::new();
    // ρ(x) − factor·ρ(src) = 0; x outside P_χ contributes ρ(x) = 0
    let mut push = |x: usize, src: usize, factor: Scalar| {
        let mut row = vec![Scalar::zero(); p.len()];
        if let Some(cx) = col_of(x) {
            row[cx] = &row[cx] + &Scalar::one();
        }
        let cs = col_of(src).expect("source in P");
        row[cs] = &row[cs] - &factor;
        rows.push(row);
    };
    for &pp in &p {
        for u in carrier.iter() {
            if let Some(up) = domain.compose(u, pp) {
                push(up, pp, chi.values[u].clone());
            }
            if let Some(pu) = domain.compose(pp, u) {
                push(pu, pp, chi.values[u].clone());
            }
            for v in carrier.iter() {
                if let (Some(upv), Some(uv)) = (
                    domain.compose(u, pp).and_then(|up| domain.compose(up, v)),
                    domain.compose(u, v),
                ) {
                    push(upv, pp, chi.values[uv].clone());
                }
            }
        }
    }
    // f(xy) = f(yx) = 0 for x ∈ I_χ ∖ P_χ, y ∉ I_χ
    for x in chi.null_not_p().iter() {
        for y in carrier.iter() {
            for xy in [domain.compose(x, y), domain.compose(y, x)].into_iter().flatten() {
                if let Some(c) = col_of(xy) {
                    let mut row = vec![Scalar::zero(); p.len()];
                    row[c] = Scalar::one();
                    rows.push(row);
                }
            }
        }
    }
    rows
}

/// Basis of the admissible `ρ: P_χ → ℂ`.
pub fn rho_space(domain: &SemigroupDomain, chi: &CharacterFunction) -> Vec<RhoFunction> {
    let p = chi.p_set.indices();
    if p.is_empty() {
        return Vec::new();
    }
    let rows = rho_constraints(domain, chi);
    let basis = linalg::nullspace(&rows, p.len(), tol::RESIDUAL);
    basis
        .into_iter()
        .map(|v| {
            let lead = v
                .iter()
                .max_by(|a, b| a.abs().total_cmp(&b.abs()))
                .filter(|s| !s.is_zero())
                .cloned()
                .unwrap_or_else(Scalar::one);
            let lead = v.iter().find(|s| !s.approx_zero(tol::RESIDUAL)).cloned().unwrap_or(lead);
            let mut values = vec![Scalar::zero(); domain.len()];
            for (k, s) in v.into_iter().enumerate() {
                values[p[k]] = &s / &lead;
            }
            RhoFunction {
                values,
                support: chi.p_set.clone(),
            }
        })
        .collect()
}

/// First constraint of condition (II) or (I) violated by `rho`, reported
/// as the offending element.
pub fn rho_violation(
    domain: &SemigroupDomain,
    chi: &CharacterFunction,
    rho: &RhoFunction,
    tol: f64,
) -> Option<usize> {
    let p = chi.p_set.indices();
    if let Some(x) = domain.elements().find(|&x| !chi.p_set.contains(x) && !rho.values[x].approx_zero(tol)) {
        return Some(x);
    }
    let rows = rho_constraints(domain, chi);
    rows.iter()
        .position(|row| {
            let s = row
                .iter()
                .zip(&p)
                .fold(Scalar::zero(), |acc, (c, &x)| acc + c * &rho.values[x]);
            !s.approx_zero(tol)
        })
        .map(|_| p[0])
}

/// True iff the tables span a space of dimension equal to their count.
/// Exact tables use exact rank; otherwise singular values above
/// `1e-10 × σ_max` are counted.
pub fn check_linear_independence(functions: &[Table]) -> bool {
    if functions.is_empty() {
        return true;
    }
    let ncols = functions[0].len();
    if functions.iter().all(|t| t.iter().all(Scalar::is_exact)) {
        linalg::rank(functions, ncols, 0.0) == functions.len()
    } else {
        let rows: Vec<Vec<_>> = functions
            .iter()
            .map(|t| t.iter().map(Scalar::to_complex).collect())
            .collect();
        linalg::float_rank(&rows, tol::RANK) == functions.len()
    }
}
