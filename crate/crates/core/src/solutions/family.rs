use alloc::format;
use alloc::string::ToString;

use serde::{Deserialize, Serialize};

use super::psi::build_psi_with_tol;
use super::{combine, scaled, tables_differ, SolutionError, SolutionPair};
use crate::characters::{AdditiveFunction, CharacterFunction, RhoFunction};
use crate::scalar::{self, Scalar, Table};
use crate::semigroup::SemigroupDomain;
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn scalar(self) -> Scalar {
        Scalar::from_i64(self.value())
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// One of the eight solution families with its parameters. Characters,
/// additive functions and `ρ` are full value tables over the domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum FamilySpec {
    /// `f = g = 0`.
    F1,
    /// `f = ±g`, `g` arbitrary off `S²z₀` and zero on it.
    F2 { g_free: Table, sign: Sign },
    /// `f = dχ(z₀)χ/(1−d²)`, `g = χ(z₀)χ/(1−d²)`.
    F3 { d: Scalar, chi: Table },
    /// `f = i(u − v)/(c⁻¹+c)`, `g = (c⁻¹u + cv)/(c⁻¹+c)` with `u = χ₁(z₀)χ₁`, `v = χ₂(z₀)χ₂`.
    F4 { c: Scalar, chi1: Table, chi2: Table },
    /// `f = ((1+ξ)χ₁ + (1−ξ)χ₂)/2γ`, `g = q(χ₁ − χ₂)/2γ`, `ξ² = 1 + q²`.
    F5 {
        q: Scalar,
        xi: Scalar,
        gamma: Scalar,
        chi1: Table,
        chi2: Table,
    },
    /// `f = ((α+q)χ₁ + (α−q)χ₂)/2γ`, `g = ((1+δ)χ₁ + (1−δ)χ₂)/2γ`, `δ² = 1 + q² − α²`.
    F6 {
        alpha: Scalar,
        q: Scalar,
        delta: Scalar,
        gamma: Scalar,
        chi1: Table,
        chi2: Table,
    },
    /// `f = Ψ/β`, `g = (χ ± Ψ)/β` with `χ(z₀) = 1/β`, `A(z₀) = 0`.
    F7 {
        beta: Scalar,
        chi: Table,
        additive: Table,
        rho: Table,
        sign: Sign,
    },
    /// `f = A(z₀)χ + Ψ`, `g = χ(z₀)χ ± f`.
    F8 {
        chi: Table,
        additive: Table,
        rho: Table,
        sign: Sign,
    },
}

impl FamilySpec {
    pub fn number(&self) -> u8 {
        match self {
            FamilySpec::F1 => 1,
            FamilySpec::F2 { .. } => 2,
            FamilySpec::F3 { .. } => 3,
            FamilySpec::F4 { .. } => 4,
            FamilySpec::F5 { .. } => 5,
            FamilySpec::F6 { .. } => 6,
            FamilySpec::F7 { .. } => 7,
            FamilySpec::F8 { .. } => 8,
        }
    }

    pub fn tag(&self) -> &'static str {
        ["F1", "F2", "F3", "F4", "F5", "F6", "F7", "F8"][self.number() as usize - 1]
    }

    /// Character tables in parameter order.
    pub fn characters(&self) -> alloc::vec::Vec<&Table> {
        match self {
            FamilySpec::F1 | FamilySpec::F2 { .. } => alloc::vec![],
            FamilySpec::F3 { chi, .. } | FamilySpec::F7 { chi, .. } | FamilySpec::F8 { chi, .. } => {
                alloc::vec![chi]
            }
            FamilySpec::F4 { chi1, chi2, .. }
            | FamilySpec::F5 { chi1, chi2, .. }
            | FamilySpec::F6 { chi1, chi2, .. } => alloc::vec![chi1, chi2],
        }
    }

    /// Runs the family's validity predicate.
    pub fn validate(&self, domain: &SemigroupDomain) -> Result<(), SolutionError> {
        build_family(domain, self).map(|_| ())
    }
}

fn invalid(msg: &str) -> SolutionError {
    SolutionError::InvalidParameters(msg.to_string())
}

fn nonzero(s: &Scalar) -> bool {
    !s.approx_zero(tol::FIT)
}

/// Exact equality for exact values, relative closeness otherwise.
fn same(a: &Scalar, b: &Scalar) -> bool {
    if a.is_exact() && b.is_exact() {
        return a == b;
    }
    (a - b).abs() <= tol::FIT * a.abs().max(b.abs()).max(1.0)
}

fn character(domain: &SemigroupDomain, values: &Table, name: &str) -> Result<CharacterFunction, SolutionError> {
    CharacterFunction::new(domain, values.clone())
        .map_err(|e| SolutionError::InvalidParameters(format!("{name} is not a character: {e}")))
}

fn check_target(actual: &Scalar, target: Option<Scalar>, name: &str) -> Result<(), SolutionError> {
    match target {
        Some(t) if same(actual, &t) => Ok(()),
        _ => Err(SolutionError::InvalidParameters(format!(
            "{name}(z0) does not match the family constraint"
        ))),
    }
}

/// Which formula to use for `χ₂(z₀)` in family 6: the one that makes the
/// construction a solution, or the variant with `(α+q)²` in place of
/// `(α−q)²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum F6Variant {
    Statement,
    ProofDisplay,
}

/// Required `(χ₁(z₀), χ₂(z₀))` for family 6, `None` when a denominator
/// vanishes.
pub fn f6_chi_z0_targets(
    alpha: &Scalar,
    q: &Scalar,
    delta: &Scalar,
    gamma: &Scalar,
    variant: F6Variant,
) -> Option<(Scalar, Scalar)> {
    let one = Scalar::one();
    let two_gamma = Scalar::from_i64(2) * gamma;
    let (p, m) = (&one + delta, &one - delta);
    let aq_plus = alpha + q;
    let aq_second = match variant {
        F6Variant::Statement => alpha - q,
        F6Variant::ProofDisplay => alpha + q,
    };
    let t1 = (&p * &p - &aq_plus * &aq_plus).checked_div(&(&two_gamma * &p))?;
    let t2 = (&m * &m - &aq_second * &aq_second).checked_div(&(&two_gamma * &m))?;
    Some((t1, t2))
}

/// The family-6 formulas without any constraint checks.
pub fn build_f6_unchecked(
    alpha: &Scalar,
    q: &Scalar,
    delta: &Scalar,
    gamma: &Scalar,
    chi1: &[Scalar],
    chi2: &[Scalar],
) -> SolutionPair {
    let one = Scalar::one();
    let inv = (Scalar::from_i64(2) * gamma).recip().unwrap_or_else(Scalar::zero);
    let f = combine(&[(&(&(alpha + q) * &inv), chi1), (&(&(alpha - q) * &inv), chi2)]);
    let g = combine(&[(&(&(&one + delta) * &inv), chi1), (&(&(&one - delta) * &inv), chi2)]);
    SolutionPair::new(f, g)
}

fn f5_targets(q: &Scalar, xi: &Scalar, gamma: &Scalar) -> Option<(Scalar, Scalar)> {
    let one = Scalar::one();
    let den = Scalar::from_i64(2) * gamma * q;
    let (p, m) = (&one + xi, &one - xi);
    let q2 = q * q;
    let t1 = (&q2 - &(&p * &p)).checked_div(&den)?;
    let t2 = -(&q2 - &(&m * &m)).checked_div(&den)?;
    Some((t1, t2))
}

fn two_distinct(
    domain: &SemigroupDomain,
    chi1: &Table,
    chi2: &Table,
) -> Result<(CharacterFunction, CharacterFunction), SolutionError> {
    let c1 = character(domain, chi1, "chi1")?;
    let c2 = character(domain, chi2, "chi2")?;
    if !tables_differ(&c1.values, &c2.values) {
        return Err(invalid("chi1 and chi2 must differ"));
    }
    Ok((c1, c2))
}

fn psi_for(
    domain: &SemigroupDomain,
    chi: &CharacterFunction,
    additive: &Table,
    rho: &Table,
) -> Result<Table, SolutionError> {
    let a = AdditiveFunction {
        values: additive.clone(),
        carrier: chi.carrier(),
    };
    let r = RhoFunction {
        values: rho.clone(),
        support: chi.p_set.clone(),
    };
    let scale = scalar::max_abs(additive.iter().chain(rho)).max(1.0);
    Ok(build_psi_with_tol(domain, chi, &a, &r, tol::FIT * scale)?.values)
}

/// Build `(f, g)` for a family after checking its validity predicate.
pub fn build_family(domain: &SemigroupDomain, spec: &FamilySpec) -> Result<SolutionPair, SolutionError> {
    let n = domain.len();
    let z0 = domain.z0();
    let one = Scalar::one();
    for t in spec.characters() {
        if t.len() != n {
            return Err(SolutionError::LengthMismatch {
                expected: n,
                found: t.len(),
            });
        }
    }
    match spec {
        FamilySpec::F1 => Ok(SolutionPair::zero(n)),
        FamilySpec::F2 { g_free, sign } => {
            if g_free.len() != n {
                return Err(SolutionError::LengthMismatch {
                    expected: n,
                    found: g_free.len(),
                });
            }
            let image = domain.product_set_z0(&domain.full_set());
            if image.len() == n {
                return Err(SolutionError::DomainMismatch("S = S^2 z0"));
            }
            let g: Table = domain
                .elements()
                .map(|x| if image.contains(x) { Scalar::zero() } else { g_free[x].clone() })
                .collect();
            if g.iter().all(|v| v.approx_zero(tol::FIT)) {
                return Err(invalid("g_free must be nonzero on S \\ S^2 z0"));
            }
            Ok(SolutionPair::new(scaled(&g, &sign.scalar()), g))
        }
        FamilySpec::F3 { d, chi } => {
            let chi = character(domain, chi, "chi")?;
            let denom = &one - &(d * d);
            if !nonzero(&denom) {
                return Err(invalid("d must not be +1 or -1"));
            }
            let cz = chi.at(z0);
            if !nonzero(cz) {
                return Err(invalid("chi(z0) must be nonzero"));
            }
            let gc = cz / &denom;
            let g = scaled(&chi.values, &gc);
            Ok(SolutionPair::new(scaled(&g, d), g))
        }
        FamilySpec::F4 { c, chi1, chi2 } => {
            if !nonzero(c) || !nonzero(&(c * c + &one)) {
                return Err(invalid("c must not be 0, i or -i"));
            }
            let (c1, c2) = two_distinct(domain, chi1, chi2)?;
            if !nonzero(c1.at(z0)) || !nonzero(c2.at(z0)) {
                return Err(invalid("chi1(z0) and chi2(z0) must be nonzero"));
            }
            let u = scaled(&c1.values, c1.at(z0));
            let v = scaled(&c2.values, c2.at(z0));
            if !tables_differ(&u, &v) {
                return Err(invalid("chi1(z0) chi1 must differ from chi2(z0) chi2"));
            }
            let cinv = c.recip().expect("c nonzero");
            let dinv = (&cinv + c).recip().expect("c^2 != -1");
            let fi = &Scalar::i() * &dinv;
            let f = combine(&[(&fi, &u), (&-&fi, &v)]);
            let g = combine(&[(&(&cinv * &dinv), &u), (&(c * &dinv), &v)]);
            Ok(SolutionPair::new(f, g))
        }
        FamilySpec::F5 { q, xi, gamma, chi1, chi2 } => {
            if !nonzero(q) || !nonzero(gamma) {
                return Err(invalid("q and gamma must be nonzero"));
            }
            if !same(&(xi * xi), &(&one + &(q * q))) {
                return Err(invalid("xi^2 must equal 1 + q^2"));
            }
            let (c1, c2) = two_distinct(domain, chi1, chi2)?;
            let targets = f5_targets(q, xi, gamma);
            check_target(c1.at(z0), targets.as_ref().map(|t| t.0.clone()), "chi1")?;
            check_target(c2.at(z0), targets.map(|t| t.1), "chi2")?;
            let inv = (Scalar::from_i64(2) * gamma).recip().expect("gamma nonzero");
            let f = combine(&[(&(&(&one + xi) * &inv), &c1.values), (&(&(&one - xi) * &inv), &c2.values)]);
            let gq = q * &inv;
            let g = combine(&[(&gq, &c1.values), (&-&gq, &c2.values)]);
            Ok(SolutionPair::new(f, g))
        }
        FamilySpec::F6 {
            alpha,
            q,
            delta,
            gamma,
            chi1,
            chi2,
        } => {
            if !nonzero(gamma) {
                return Err(invalid("gamma must be nonzero"));
            }
            if !nonzero(&(q - alpha)) || !nonzero(&(q + alpha)) {
                return Err(invalid("q must not be +alpha or -alpha"));
            }
            if !same(&(delta * delta), &(&one + &(q * q) - alpha * alpha)) {
                return Err(invalid("delta^2 must equal 1 + q^2 - alpha^2"));
            }
            let (c1, c2) = two_distinct(domain, chi1, chi2)?;
            let targets = f6_chi_z0_targets(alpha, q, delta, gamma, F6Variant::Statement);
            check_target(c1.at(z0), targets.as_ref().map(|t| t.0.clone()), "chi1")?;
            check_target(c2.at(z0), targets.map(|t| t.1), "chi2")?;
            Ok(build_f6_unchecked(alpha, q, delta, gamma, &c1.values, &c2.values))
        }
        FamilySpec::F7 {
            beta,
            chi,
            additive,
            rho,
            sign,
        } => {
            let beta_inv = beta.recip().filter(|_| nonzero(beta)).ok_or_else(|| invalid("beta must be nonzero"))?;
            let chi = character(domain, chi, "chi")?;
            if !same(chi.at(z0), &beta_inv) {
                return Err(invalid("chi(z0) must equal 1/beta"));
            }
            if additive.len() == n && !additive[z0].approx_zero(tol::FIT) {
                return Err(invalid("A(z0) must be 0"));
            }
            let psi = psi_for(domain, &chi, additive, rho)?;
            let f = scaled(&psi, &beta_inv);
            let g = combine(&[(&beta_inv, &chi.values), (&(&sign.scalar() * &beta_inv), &psi)]);
            Ok(SolutionPair::new(f, g))
        }
        FamilySpec::F8 {
            chi,
            additive,
            rho,
            sign,
        } => {
            let chi = character(domain, chi, "chi")?;
            if !nonzero(chi.at(z0)) {
                return Err(invalid("chi(z0) must be nonzero"));
            }
            let psi = psi_for(domain, &chi, additive, rho)?;
            let az = additive[z0].clone();
            let f = combine(&[(&az, &chi.values), (&one, &psi)]);
            let s = sign.scalar();
            let g = combine(&[(chi.at(z0), &chi.values), (&s, &f)]);
            Ok(SolutionPair::new(f, g))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{additive_basis, enumerate_characters, rho_space};
    use crate::corpus;
    use crate::solutions::{check_alpha_cosine, check_kannappan, extract_mu};
    use alloc::vec;
    use alloc::vec::Vec;

    fn ints(v: &[i64]) -> Table {
        v.iter().map(|&k| Scalar::from_i64(k)).collect()
    }

    #[test]
    fn f3_with_d_zero_on_z2() {
        let z2 = corpus::cyclic(2);
        let pair = build_family(&z2, &FamilySpec::F3 { d: Scalar::zero(), chi: ints(&[1, 1]) }).unwrap();
        assert_eq!(pair, SolutionPair::new(ints(&[0, 0]), ints(&[1, 1])));
    }

    #[test]
    fn f4_example_on_z2() {
        let z2 = corpus::cyclic(2);
        let spec = FamilySpec::F4 {
            c: Scalar::one(),
            chi1: ints(&[1, 1]),
            chi2: ints(&[1, -1]),
        };
        let pair = build_family(&z2, &spec).unwrap();
        assert_eq!(pair, SolutionPair::new(vec![Scalar::zero(), Scalar::i()], ints(&[1, 0])));
        assert_eq!(check_kannappan(&z2, &pair), 0.0);
    }

    #[test]
    fn f2_on_null_semigroup() {
        let null = corpus::null(2);
        let spec = FamilySpec::F2 {
            g_free: ints(&[0, 5]),
            sign: Sign::Plus,
        };
        let pair = build_family(&null, &spec).unwrap();
        assert_eq!(pair, SolutionPair::new(ints(&[0, 5]), ints(&[0, 5])));
        assert_eq!(check_kannappan(&null, &pair), 0.0);
        assert_eq!(
            build_family(&corpus::cyclic(2), &FamilySpec::F2 { g_free: ints(&[1, 1]), sign: Sign::Plus }),
            Err(SolutionError::DomainMismatch("S = S^2 z0"))
        );
    }

    #[test]
    fn f4_predicate_failures() {
        let z2 = corpus::cyclic(2);
        let bad_c = FamilySpec::F4 {
            c: Scalar::i(),
            chi1: ints(&[1, 1]),
            chi2: ints(&[1, -1]),
        };
        assert!(matches!(build_family(&z2, &bad_c), Err(SolutionError::InvalidParameters(_))));
        let same_chars = FamilySpec::F4 {
            c: Scalar::one(),
            chi1: ints(&[1, 1]),
            chi2: ints(&[1, 1]),
        };
        assert!(matches!(build_family(&z2, &same_chars), Err(SolutionError::InvalidParameters(_))));
    }

    #[test]
    fn f5_on_z2_with_nontrivial_z0() {
        // q = i, ξ = 0: χ₁(z₀) = −1/(γi), χ₂(z₀) = 1/(γi); with γ = i these are 1 and −1
        let z2 = corpus::cyclic(2).with_z0(1).unwrap();
        let spec = FamilySpec::F5 {
            q: Scalar::i(),
            xi: Scalar::zero(),
            gamma: Scalar::i(),
            chi1: ints(&[1, 1]),
            chi2: ints(&[1, -1]),
        };
        let pair = build_family(&z2, &spec).unwrap();
        assert_eq!(check_kannappan(&z2, &pair), 0.0);
        let r = crate::solutions::check_lemma33_identities(&z2, &pair);
        assert_eq!(r.product_identity, Some(0.0));
    }

    #[test]
    fn f6_statement_variant_solves_and_scales() {
        let d = corpus::z2_with_zero().with_z0(2).unwrap();
        let chars = enumerate_characters(&d).unwrap();
        let vanishing: Vec<_> = chars.iter().filter(|c| c.at(2).is_zero()).collect();
        assert_eq!(vanishing.len(), 2);
        let spec = FamilySpec::F6 {
            alpha: Scalar::one(),
            q: Scalar::from_i64(2),
            delta: Scalar::from_i64(2),
            gamma: Scalar::from_i64(3),
            chi1: vanishing[0].values.clone(),
            chi2: vanishing[1].values.clone(),
        };
        let pair = build_family(&d, &spec).unwrap();
        assert_eq!(check_kannappan(&d, &pair), 0.0);
    }

    #[test]
    fn f6_rescaled_satisfies_alpha_cosine() {
        let d = corpus::z2_with_zero().with_z0(1).unwrap();
        let chars = enumerate_characters(&d).unwrap();
        let (alpha, q, delta) = (Scalar::zero(), Scalar::i(), Scalar::zero());
        let mut checked = 0;
        for c1 in &chars {
            for c2 in &chars {
                if c1 == c2 {
                    continue;
                }
                for gamma in [Scalar::one(), Scalar::from_i64(-2), Scalar::i()] {
                    let spec = FamilySpec::F6 {
                        alpha: alpha.clone(),
                        q: q.clone(),
                        delta: delta.clone(),
                        gamma,
                        chi1: c1.values.clone(),
                        chi2: c2.values.clone(),
                    };
                    let Ok(pair) = build_family(&d, &spec) else { continue };
                    assert_eq!(check_kannappan(&d, &pair), 0.0);
                    let zz = d.z0_squared().unwrap();
                    let (gz, gzz, fzz) = (&pair.g[1], &pair.g[zz], &pair.f[zz]);
                    if gzz.is_zero() || !pair.f[1].is_zero() {
                        continue;
                    }
                    let beta = gz / gzz;
                    let a = fzz / gzz;
                    let rescaled = SolutionPair::new(scaled(&pair.f, &beta), scaled(&pair.g, &beta));
                    assert_eq!(check_alpha_cosine(&d, &rescaled, &a), 0.0);
                    checked += 1;
                }
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn f6_proof_variant_breaks_on_monoid() {
        let d = corpus::monoid_e_a_zero().with_z0(1).unwrap();
        let (alpha, q, delta, gamma) = (Scalar::one(), Scalar::from_i64(2), Scalar::from_i64(2), Scalar::from_i64(4));
        let (t1, t2) = f6_chi_z0_targets(&alpha, &q, &delta, &gamma, F6Variant::ProofDisplay).unwrap();
        let chi1 = ints(&[1, 0, 0]);
        let chi2 = ints(&[1, 1, 1]);
        assert_eq!((&chi1[1], &chi2[1]), (&t1, &t2));
        let pair = build_f6_unchecked(&alpha, &q, &delta, &gamma, &chi1, &chi2);
        assert!(check_kannappan(&d, &pair) > 0.0);
        let spec = FamilySpec::F6 { alpha, q, delta, gamma, chi1, chi2 };
        assert!(matches!(build_family(&d, &spec), Err(SolutionError::InvalidParameters(_))));
    }

    #[test]
    fn f7_on_monoid_and_mu_of_f8() {
        let d = corpus::monoid_e_a_zero();
        let spec = FamilySpec::F7 {
            beta: Scalar::one(),
            chi: ints(&[1, 0, 0]),
            additive: ints(&[0, 0, 0]),
            rho: ints(&[0, 1, 0]),
            sign: Sign::Plus,
        };
        let pair = build_family(&d, &spec).unwrap();
        assert_eq!(pair, SolutionPair::new(ints(&[0, 1, 0]), ints(&[1, 1, 0])));
        assert_eq!(check_kannappan(&d, &pair), 0.0);

        let w = SemigroupDomain::naturals_window(12, 2).unwrap();
        let chi = CharacterFunction::exponential(&w, Scalar::from_i64(2)).unwrap();
        let a = additive_basis(&w, Some(&chi)).unwrap().remove(0);
        for (sign, mu) in [(Sign::Plus, -2), (Sign::Minus, 2)] {
            let spec = FamilySpec::F8 {
                chi: chi.values.clone(),
                additive: a.values.clone(),
                rho: crate::scalar::zero_table(12),
                sign,
            };
            let pair = build_family(&w, &spec).unwrap();
            assert_eq!(check_kannappan(&w, &pair), 0.0);
            assert_eq!(extract_mu(&w, &pair).unwrap(), Some(Scalar::from_i64(mu)));
        }
    }

    #[test]
    fn f8_uses_the_consistent_sign() {
        // window, χ = 1, A(x) = x, z₀ = 1: the printed g = (χ(z₀) − A(z₀))χ + Ψ is not a solution
        let w = SemigroupDomain::naturals_window(10, 1).unwrap();
        let one = CharacterFunction::exponential(&w, Scalar::one()).unwrap();
        let a: Table = (1..=10).map(Scalar::from_i64).collect();
        let spec = FamilySpec::F8 {
            chi: one.values.clone(),
            additive: a.clone(),
            rho: crate::scalar::zero_table(10),
            sign: Sign::Minus,
        };
        let pair = build_family(&w, &spec).unwrap();
        assert_eq!(check_kannappan(&w, &pair), 0.0);
        let printed = SolutionPair::new(pair.f.clone(), a);
        assert!(check_kannappan(&w, &printed) > 0.0);
    }

    #[test]
    fn f7_rho_basis_on_monoid() {
        let d = corpus::monoid_e_a_zero();
        let chi = CharacterFunction::new(&d, ints(&[1, 0, 0])).unwrap();
        let rho = rho_space(&d, &chi).remove(0);
        for sign in Sign::BOTH {
            let spec = FamilySpec::F8 {
                chi: chi.values.clone(),
                additive: ints(&[0, 0, 0]),
                rho: rho.values.clone(),
                sign,
            };
            assert_eq!(check_kannappan(&d, &build_family(&d, &spec).unwrap()), 0.0);
        }
    }
}
