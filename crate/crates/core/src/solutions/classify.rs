use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::checks::{check_lemma33_identities, extract_mu, kannappan_witness, lambda_roots, Lemma33Report};
use super::family::{build_family, FamilySpec, Sign};
use super::{combine, SolutionError, SolutionPair};
use crate::characters::{
    additive_basis, check_linear_independence, enumerate_characters, rho_space, AdditiveFunction,
    CharacterFunction, RhoFunction,
};
use crate::linalg;
use crate::scalar::{self, Scalar, Table};
use crate::semigroup::{DomainKind, SemigroupDomain};
use crate::tol::Tolerance;

/// A family whose rebuilt pair reproduces the input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyMatch {
    pub spec: FamilySpec,
    /// `max |input − rebuilt| / max(1, max |input|)`.
    pub rebuild_error: f64,
    /// Positions of the spec's characters in the domain's enumerated list.
    pub character_indices: Vec<Option<usize>>,
}

/// Which branch of the case analysis the pair falls into, with the scalars
/// that branch computes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum ProofRoute {
    Zero,
    /// `f = d·g` (`d` absent when `g = 0`).
    Dependent { d: Option<Scalar> },
    /// `f(z₀) ≠ 0`: `μ` and the roots of `λ² + μλ + 1`.
    FzNonzero {
        mu: Option<Scalar>,
        lambda: Option<(Scalar, Scalar)>,
    },
    /// `f(z₀) = 0`, `g(z₀²) = 0`: `(γf, γg)` with `γ = g(z₀)/f(z₀²)` obeys the cosine law.
    FzZeroCosine { gamma: Option<Scalar> },
    /// `f(z₀) = 0`, `g(z₀²) ≠ 0`: `(βg, βf)` obeys the α-cosine law.
    FzZeroAlpha { beta: Scalar, alpha: Scalar },
    /// `z₀²` lies outside the window.
    FzZeroUndetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    /// All matching families, lowest family number first.
    pub matches: Vec<FamilyMatch>,
    pub route: ProofRoute,
    pub identities: Lemma33Report,
    pub unclassified: bool,
}

impl ClassificationReport {
    pub fn primary(&self) -> Option<&FamilyMatch> {
        self.matches.first()
    }

    pub fn tags(&self) -> Vec<&'static str> {
        self.matches.iter().map(|m| m.spec.tag()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassifyError {
    #[error("not a solution: residual {residual:.3e} at ({x}, {y})")]
    ResidualTooLarge { residual: f64, x: usize, y: usize },
    #[error("no family reproduces the pair: possible counterexample")]
    Unclassified(Box<ClassificationReport>),
    #[error(transparent)]
    Solution(#[from] SolutionError),
}

struct CharacterData {
    chi: CharacterFunction,
    additive: Vec<AdditiveFunction>,
    rho: Vec<RhoFunction>,
}

/// Fits solution pairs on one domain back to the eight families. Holds the
/// domain's characters and their additive and `ρ` bases so that repeated
/// calls are cheap.
pub struct Classifier {
    domain: SemigroupDomain,
    tol: Tolerance,
    characters: Vec<CharacterData>,
    window_additive: Vec<AdditiveFunction>,
    s2z0_is_all: bool,
}

/// One-shot [`Classifier::classify`].
pub fn classify(domain: &SemigroupDomain, pair: &SolutionPair, tol: Tolerance) -> Result<ClassificationReport, ClassifyError> {
    Classifier::new(domain, tol)?.classify(pair)
}

impl Classifier {
    pub fn new(domain: &SemigroupDomain, tol: Tolerance) -> Result<Self, SolutionError> {
        let mut characters = Vec::new();
        let mut window_additive = Vec::new();
        match domain.kind() {
            DomainKind::FiniteTable { .. } => {
                for chi in enumerate_characters(domain)? {
                    let additive = additive_basis(domain, Some(&chi)).unwrap_or_default();
                    let rho = rho_space(domain, &chi);
                    characters.push(CharacterData { chi, additive, rho });
                }
            }
            DomainKind::NaturalsWindow { .. } => {
                window_additive = additive_basis(domain, None)?;
            }
        }
        let s2z0_is_all = domain.product_set_z0(&domain.full_set()).len() == domain.len();
        Ok(Classifier {
            domain: domain.clone(),
            tol,
            characters,
            window_additive,
            s2z0_is_all,
        })
    }

    pub fn domain(&self) -> &SemigroupDomain {
        &self.domain
    }

    pub fn characters(&self) -> impl Iterator<Item = &CharacterFunction> {
        self.characters.iter().map(|c| &c.chi)
    }

    /// Index of a character table in the enumerated list.
    pub fn character_index(&self, values: &[Scalar]) -> Option<usize> {
        self.characters
            .iter()
            .position(|c| super::tables_match(&c.chi.values, values, self.tol.fit))
    }

    pub fn classify(&self, pair: &SolutionPair) -> Result<ClassificationReport, ClassifyError> {
        let domain = &self.domain;
        pair.check_len(domain.len())?;
        let scale = pair.max_abs().max(1.0);
        let gate = if pair.is_exact() { 0.0 } else { self.tol.residual * scale * scale };
        if let Some((x, y, residual)) = kannappan_witness(domain, pair, gate) {
            return Err(ClassifyError::ResidualTooLarge { residual, x, y });
        }

        let mut best: Vec<FamilyMatch> = Vec::new();
        for spec in self.candidates(pair) {
            let Ok(rebuilt) = build_family(domain, &spec) else {
                continue;
            };
            let err = pair.relative_distance(&rebuilt);
            let exact = pair.is_exact() && rebuilt.is_exact();
            let accepted = if exact { err == 0.0 } else { err <= self.tol.fit };
            if !accepted {
                continue;
            }
            let character_indices = spec.characters().iter().map(|t| self.character_index(t)).collect();
            let m = FamilyMatch {
                spec,
                rebuild_error: err,
                character_indices,
            };
            match best.iter_mut().find(|b| b.spec.number() == m.spec.number()) {
                Some(b) if m.rebuild_error < b.rebuild_error => *b = m,
                Some(_) => {}
                None => best.push(m),
            }
        }
        best.sort_by_key(|m| m.spec.number());

        let report = ClassificationReport {
            unclassified: best.is_empty(),
            matches: best,
            route: self.route(pair),
            identities: check_lemma33_identities(domain, pair),
        };
        if report.unclassified {
            Err(ClassifyError::Unclassified(Box::new(report)))
        } else {
            Ok(report)
        }
    }

    fn zero_tol(&self, pair: &SolutionPair) -> f64 {
        self.tol.fit * pair.max_abs().max(1.0)
    }

    fn route(&self, pair: &SolutionPair) -> ProofRoute {
        let (f, g) = (&pair.f, &pair.g);
        let zt = self.zero_tol(pair);
        let z0 = self.domain.z0();
        if f.iter().chain(g).all(|v| v.approx_zero(zt)) {
            return ProofRoute::Zero;
        }
        if !check_linear_independence(&[f.clone(), g.clone()]) {
            let d = argmax(g).filter(|&x| !g[x].approx_zero(zt)).map(|x| &f[x] / &g[x]);
            return ProofRoute::Dependent { d };
        }
        if !f[z0].approx_zero(zt) {
            let mu = extract_mu(&self.domain, pair).ok().flatten();
            let lambda = mu.as_ref().map(lambda_roots);
            return ProofRoute::FzNonzero { mu, lambda };
        }
        let Some(zz) = self.domain.z0_squared() else {
            return ProofRoute::FzZeroUndetermined;
        };
        if g[zz].approx_zero(zt) {
            ProofRoute::FzZeroCosine {
                gamma: g[z0].checked_div(&f[zz]).filter(|_| !f[zz].approx_zero(zt)),
            }
        } else {
            ProofRoute::FzZeroAlpha {
                beta: &g[z0] / &g[zz],
                alpha: &f[zz] / &g[zz],
            }
        }
    }

    fn candidates(&self, pair: &SolutionPair) -> Vec<FamilySpec> {
        let mut out = Vec::new();
        let zt = self.zero_tol(pair);
        let (f, g) = (&pair.f, &pair.g);
        if f.iter().chain(g).all(|v| v.approx_zero(zt)) {
            out.push(FamilySpec::F1);
            return out;
        }
        if !self.s2z0_is_all {
            for sign in Sign::BOTH {
                out.push(FamilySpec::F2 { g_free: g.clone(), sign });
            }
        }
        self.fit_dependent(pair, zt, &mut out);
        if let Some(parts) = self.two_character_parts(pair, zt) {
            fit_two_character(&parts, zt, &mut out);
        }
        self.fit_sine_families(pair, &mut out);
        out
    }

    /// `χ` with `χ(z₀)χ = h`, if one exists.
    fn recover_scaled_character(&self, h: &[Scalar]) -> Option<CharacterFunction> {
        let z0 = self.domain.z0();
        let fit = self.tol.fit;
        match self.domain.kind() {
            DomainKind::FiniteTable { .. } => self
                .characters
                .iter()
                .map(|c| &c.chi)
                .filter(|chi| !chi.at(z0).is_zero())
                .find(|chi| super::tables_match(h, &super::scaled(&chi.values, chi.at(z0)), fit))
                .cloned(),
            DomainKind::NaturalsWindow { window } => {
                if *window < 2 {
                    return None;
                }
                let base = h[1].checked_div(&h[0]).filter(|_| !h[0].approx_zero(fit))?;
                let chi = CharacterFunction::exponential(&self.domain, base).ok()?;
                super::tables_match(h, &super::scaled(&chi.values, chi.at(z0)), fit).then_some(chi)
            }
        }
    }

    /// `f = d·g` with `(1 − d²)g = χ(z₀)χ`.
    fn fit_dependent(&self, pair: &SolutionPair, zt: f64, out: &mut Vec<FamilySpec>) {
        let (f, g) = (&pair.f, &pair.g);
        let Some(x) = argmax(g).filter(|&x| !g[x].approx_zero(zt)) else {
            return;
        };
        let d = &f[x] / &g[x];
        let h = super::scaled(g, &(Scalar::one() - &d * &d));
        if let Some(chi) = self.recover_scaled_character(&h) {
            out.push(FamilySpec::F3 { d, chi: chi.values });
        }
    }

    fn two_character_parts(&self, pair: &SolutionPair, zt: f64) -> Option<TwoCharacterParts> {
        match self.domain.kind() {
            DomainKind::FiniteTable { .. } => {
                if self.characters.len() < 2 {
                    return None;
                }
                let cols: Vec<Table> = self.characters.iter().map(|c| c.chi.values.clone()).collect();
                let a = linalg::least_squares(&cols, &pair.f, 0.0)?;
                let b = linalg::least_squares(&cols, &pair.g, 0.0)?;
                let support: Vec<usize> = (0..cols.len())
                    .filter(|&k| !a[k].approx_zero(zt) || !b[k].approx_zero(zt))
                    .collect();
                let [k1, k2] = support[..] else {
                    return None;
                };
                Some(TwoCharacterParts {
                    chi1: cols[k1].clone(),
                    chi2: cols[k2].clone(),
                    a: (a[k1].clone(), a[k2].clone()),
                    b: (b[k1].clone(), b[k2].clone()),
                })
            }
            DomainKind::NaturalsWindow { .. } => self.prony_parts(pair, zt),
        }
    }

    /// Writes `f` and `g` as combinations of two exponentials `t₁ˣ`, `t₂ˣ`
    /// found from the shared recurrence `s(x+2) = p·s(x+1) + r·s(x)`.
    fn prony_parts(&self, pair: &SolutionPair, zt: f64) -> Option<TwoCharacterParts> {
        let n = self.domain.len();
        if n < 4 {
            return None;
        }
        let mut lag1 = Vec::new();
        let mut lag0 = Vec::new();
        let mut target = Vec::new();
        for s in [&pair.f, &pair.g] {
            for x in 0..n - 2 {
                lag1.push(s[x + 1].clone());
                lag0.push(s[x].clone());
                target.push(s[x + 2].clone());
            }
        }
        let pr = linalg::least_squares(&[lag1, lag0], &target, 0.0)?;
        let (p, r) = (&pr[0], &pr[1]);
        let disc = p * p + Scalar::from_i64(4) * r;
        if disc.approx_zero(self.tol.fit) {
            return None;
        }
        let root = disc.sqrt();
        let half = Scalar::from_ratio(1, 2);
        let mut bases = [&(p + &root) * &half, &(p - &root) * &half];
        if bases.iter().any(|t| t.approx_zero(self.tol.fit)) {
            return None;
        }
        bases.sort_by(|a, b| a.canonical_cmp(b));
        let [t1, t2] = bases;
        let chi1 = CharacterFunction::exponential(&self.domain, t1).ok()?.values;
        let chi2 = CharacterFunction::exponential(&self.domain, t2).ok()?.values;
        let cols = [chi1.clone(), chi2.clone()];
        let a = linalg::least_squares(&cols, &pair.f, 0.0)?;
        let b = linalg::least_squares(&cols, &pair.g, 0.0)?;
        let present = |k: usize| !a[k].approx_zero(zt) || !b[k].approx_zero(zt);
        if !present(0) || !present(1) {
            return None;
        }
        Some(TwoCharacterParts {
            chi1,
            chi2,
            a: (a[0].clone(), a[1].clone()),
            b: (b[0].clone(), b[1].clone()),
        })
    }

    /// Families built on `Ψ`: `g − s·f = χ(z₀)χ` for a sign `s`.
    fn fit_sine_families(&self, pair: &SolutionPair, out: &mut Vec<FamilySpec>) {
        let (f, g) = (&pair.f, &pair.g);
        let z0 = self.domain.z0();
        for sign in Sign::BOTH {
            let s = sign.scalar();
            let h = combine(&[(&Scalar::one(), g), (&-&s, f)]);
            let Some(chi) = self.recover_scaled_character(&h) else {
                continue;
            };
            let (additive_basis, rho_basis) = self.bases_for(&chi);
            let carrier = chi.carrier();
            let ratio: Table = self
                .domain
                .elements()
                .map(|x| if carrier.contains(x) { &f[x] / chi.at(x) } else { Scalar::zero() })
                .collect();
            let on_p = |scale: &Scalar| -> Table {
                let raw: Table = self
                    .domain
                    .elements()
                    .map(|x| if chi.p_set.contains(x) { &f[x] * scale } else { Scalar::zero() })
                    .collect();
                project(rho_basis.iter().map(|r| &r.values), &raw)
            };

            // f = A(z₀)χ + Ψ, so f/χ = A + A(z₀) on the carrier
            let az = &ratio[z0] * &Scalar::from_ratio(1, 2);
            let shifted: Table = self
                .domain
                .elements()
                .map(|x| if carrier.contains(x) { &ratio[x] - &az } else { Scalar::zero() })
                .collect();
            out.push(FamilySpec::F8 {
                chi: chi.values.clone(),
                additive: project(additive_basis.iter().map(|a| &a.values), &shifted),
                rho: on_p(&Scalar::one()),
                sign,
            });

            // f = Ψ/β with β = 1/χ(z₀)
            if let Some(beta) = chi.at(z0).recip() {
                let a_raw = super::scaled(&ratio, &beta);
                out.push(FamilySpec::F7 {
                    additive: project(additive_basis.iter().map(|a| &a.values), &a_raw),
                    rho: on_p(&beta),
                    beta,
                    chi: chi.values.clone(),
                    sign,
                });
            }
        }
    }

    fn bases_for(&self, chi: &CharacterFunction) -> (Vec<AdditiveFunction>, Vec<RhoFunction>) {
        match self.domain.kind() {
            DomainKind::FiniteTable { .. } => self
                .characters
                .iter()
                .find(|c| c.chi.values == chi.values)
                .map(|c| (c.additive.clone(), c.rho.clone()))
                .unwrap_or_default(),
            DomainKind::NaturalsWindow { .. } => (self.window_additive.clone(), vec![]),
        }
    }
}

/// Least-squares projection onto the span of `basis` (zero for an empty basis).
fn project<'a>(basis: impl Iterator<Item = &'a Table>, target: &[Scalar]) -> Table {
    let cols: Vec<Table> = basis.cloned().collect();
    if cols.is_empty() {
        return scalar::zero_table(target.len());
    }
    match linalg::least_squares(&cols, target, 0.0) {
        Some(c) => {
            let terms: Vec<(&Scalar, &[Scalar])> = c.iter().zip(&cols).map(|(k, t)| (k, t.as_slice())).collect();
            combine(&terms)
        }
        None => scalar::zero_table(target.len()),
    }
}

fn argmax(t: &[Scalar]) -> Option<usize> {
    (0..t.len()).max_by(|&a, &b| t[a].abs().total_cmp(&t[b].abs()))
}

/// `f = a₁χ₁ + a₂χ₂`, `g = b₁χ₁ + b₂χ₂`.
struct TwoCharacterParts {
    chi1: Table,
    chi2: Table,
    a: (Scalar, Scalar),
    b: (Scalar, Scalar),
}

fn fit_two_character(parts: &TwoCharacterParts, zt: f64, out: &mut Vec<FamilySpec>) {
    let (a1, a2) = &parts.a;
    let (b1, b2) = &parts.b;
    let minus_i = -Scalar::i();
    let nz = |s: &Scalar| !s.approx_zero(zt);
    let chis = || (parts.chi1.clone(), parts.chi2.clone());

    // a₁/b₁ = i/c⁻¹ and b₂/a₂ = c/(−i)
    if nz(b1) {
        let (chi1, chi2) = chis();
        out.push(FamilySpec::F4 { c: &minus_i * &(a1 / b1), chi1, chi2 });
    }
    if nz(a2) {
        let (chi1, chi2) = chis();
        out.push(FamilySpec::F4 { c: &minus_i * &(b2 / a2), chi1, chi2 });
    }
    let fsum = a1 + a2;
    if nz(&fsum) {
        let gamma = fsum.recip().expect("nonzero");
        let (chi1, chi2) = chis();
        out.push(FamilySpec::F5 {
            xi: &gamma * &(a1 - a2),
            q: &(Scalar::from_i64(2) * &gamma) * b1,
            gamma,
            chi1,
            chi2,
        });
    }
    let gsum = b1 + b2;
    if nz(&gsum) {
        let gamma = gsum.recip().expect("nonzero");
        let (chi1, chi2) = chis();
        out.push(FamilySpec::F6 {
            alpha: &gamma * &fsum,
            q: &gamma * &(a1 - a2),
            delta: &gamma * &(b1 - b2),
            gamma,
            chi1,
            chi2,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn ints(v: &[i64]) -> Table {
        v.iter().map(|&k| Scalar::from_i64(k)).collect()
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn zero_pair_is_f1() {
        let z2 = corpus::cyclic(2);
        let r = classify(&z2, &SolutionPair::zero(2), tol()).unwrap();
        assert_eq!(r.tags(), vec!["F1"]);
        assert_eq!(r.route, ProofRoute::Zero);
    }

    #[test]
    fn f4_example_fits_canonical_c() {
        let z2 = corpus::cyclic(2);
        let pair = SolutionPair::new(vec![Scalar::zero(), Scalar::i()], ints(&[1, 0]));
        let r = classify(&z2, &pair, tol()).unwrap();
        assert_eq!(r.primary().unwrap().spec.tag(), "F4");
        let FamilySpec::F4 { c, .. } = &r.primary().unwrap().spec else { unreachable!() };
        assert!(*c == Scalar::one() || *c == Scalar::from_i64(-1));
        assert_eq!(r.primary().unwrap().rebuild_error, 0.0);
    }

    #[test]
    fn f7_round_trip_on_monoid() {
        let d = corpus::monoid_e_a_zero();
        let spec = FamilySpec::F7 {
            beta: Scalar::one(),
            chi: ints(&[1, 0, 0]),
            additive: ints(&[0, 0, 0]),
            rho: ints(&[0, 1, 0]),
            sign: Sign::Plus,
        };
        let pair = build_family(&d, &spec).unwrap();
        let r = classify(&d, &pair, tol()).unwrap();
        assert!(r.matches.iter().any(|m| m.spec == spec));
        let rebuilt = build_family(&d, &r.primary().unwrap().spec).unwrap();
        assert_eq!(rebuilt, pair);
    }

    #[test]
    fn perturbed_pair_is_rejected() {
        let z2 = corpus::cyclic(2);
        let pair = SolutionPair::new(vec![Scalar::zero(), Scalar::i()], vec![Scalar::float(1.001, 0.0), Scalar::zero()]);
        assert!(matches!(classify(&z2, &pair, tol()), Err(ClassifyError::ResidualTooLarge { .. })));
    }

    #[test]
    fn float_pairs_classify() {
        let z2 = corpus::cyclic(2);
        let pair = SolutionPair::new(vec![Scalar::zero(), Scalar::i()], ints(&[1, 0])).to_float();
        let r = classify(&z2, &pair, tol()).unwrap();
        assert_eq!(r.primary().unwrap().spec.tag(), "F4");
        assert!(r.primary().unwrap().rebuild_error < 1e-12);
    }

    #[test]
    fn window_families_classify() {
        let w = SemigroupDomain::naturals_window(12, 2).unwrap();
        let chi = CharacterFunction::exponential(&w, Scalar::from_i64(2)).unwrap();
        let spec = FamilySpec::F8 {
            chi: chi.values.clone(),
            additive: (1..=12).map(Scalar::from_i64).collect(),
            rho: scalar::zero_table(12),
            sign: Sign::Minus,
        };
        let pair = build_family(&w, &spec).unwrap();
        let r = classify(&w, &pair, tol()).unwrap();
        assert_eq!(r.primary().unwrap().spec, spec);

        let c1 = CharacterFunction::exponential(&w, Scalar::i()).unwrap();
        let c2 = CharacterFunction::exponential(&w, Scalar::from_i64(-1)).unwrap();
        let f4 = FamilySpec::F4 { c: Scalar::from_i64(2), chi1: c1.values, chi2: c2.values };
        let pair = build_family(&w, &f4).unwrap();
        let r = classify(&w, &pair, tol()).unwrap();
        assert_eq!(r.primary().unwrap().spec.tag(), "F4");
        assert_eq!(build_family(&w, &r.primary().unwrap().spec).unwrap(), pair);
    }
}
