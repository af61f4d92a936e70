use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::checks::check_kannappan;
use super::family::{build_family, FamilySpec, Sign};
use super::{SolutionError, SolutionPair};
use crate::characters::{additive_basis, enumerate_characters, rho_space, CharacterFunction};
use crate::scalar::{self, Scalar};
use crate::semigroup::SemigroupDomain;

/// Parameter values tried for each continuous family parameter, and the
/// seed for sampling the free part of family 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub d: Vec<Scalar>,
    pub c: Vec<Scalar>,
    pub q: Vec<Scalar>,
    pub gamma: Vec<Scalar>,
    pub alpha: Vec<Scalar>,
    pub seed: u64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig::uniform(GridConfig::default_values())
    }
}

impl GridConfig {
    /// `{0, ±1, ±2, ±i, 1+i, 1/2}`.
    pub fn default_values() -> Vec<Scalar> {
        vec![
            Scalar::zero(),
            Scalar::one(),
            Scalar::from_i64(-1),
            Scalar::from_i64(2),
            Scalar::from_i64(-2),
            Scalar::i(),
            -Scalar::i(),
            Scalar::gaussian((1, 1), (1, 1)),
            Scalar::from_ratio(1, 2),
        ]
    }

    pub fn uniform(values: Vec<Scalar>) -> Self {
        GridConfig {
            d: values.clone(),
            c: values.clone(),
            q: values.clone(),
            gamma: values.clone(),
            alpha: values,
            seed: 0,
        }
    }

    /// Replace one parameter's values by name (`d`, `c`, `q`, `gamma`, `alpha`).
    pub fn set(&mut self, name: &str, values: Vec<Scalar>) -> Result<(), SolutionError> {
        let slot = match name {
            "d" => &mut self.d,
            "c" => &mut self.c,
            "q" => &mut self.q,
            "gamma" => &mut self.gamma,
            "alpha" => &mut self.alpha,
            _ => return Err(SolutionError::InvalidParameters(alloc::format!("unknown grid parameter `{name}`"))),
        };
        *slot = values;
        Ok(())
    }
}

fn signed_roots(s: &Scalar) -> Vec<Scalar> {
    match s.exact_sqrt() {
        Some(r) if r.is_zero() => vec![r],
        Some(r) => vec![r.clone(), -r],
        None => vec![],
    }
}

/// γ solving `χⱼ(z₀) = numⱼ/(denⱼ·γ)` for the first character nonzero at
/// `z₀`; every nonzero grid value when both vanish there.
fn gamma_choices(targets: [(&Scalar, Scalar, Scalar); 2], grid: &[Scalar]) -> Vec<Scalar> {
    for (value, num, den) in targets {
        if !value.is_zero() {
            return num
                .checked_div(&(&den * value))
                .filter(|g| !g.is_zero())
                .into_iter()
                .collect();
        }
    }
    grid.iter().filter(|g| !g.is_zero()).cloned().collect()
}

/// Every family instance over the grid that passes its predicate and solves
/// the equation exactly, in family order.
pub fn enumerate_all_families(
    domain: &SemigroupDomain,
    config: &GridConfig,
) -> Result<Vec<(FamilySpec, SolutionPair)>, SolutionError> {
    let chars = enumerate_characters(domain)?;
    let z0 = domain.z0();
    let mut specs = vec![FamilySpec::F1];

    let image = domain.product_set_z0(&domain.full_set());
    if image.len() < domain.len() {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let grid = GridConfig::default_values();
        for sign in Sign::BOTH {
            let mut g_free: Vec<Scalar> = domain
                .elements()
                .map(|x| {
                    let pick = grid[(rng.next_u32() as usize) % grid.len()].clone();
                    if image.contains(x) { Scalar::zero() } else { pick }
                })
                .collect();
            if g_free.iter().all(Scalar::is_zero) {
                let first = image.complement().iter().next().expect("S != S^2 z0");
                g_free[first] = Scalar::one();
            }
            specs.push(FamilySpec::F2 { g_free, sign });
        }
    }

    let nonzero_at_z0: Vec<&CharacterFunction> = chars.iter().filter(|c| !c.at(z0).is_zero()).collect();
    for chi in &nonzero_at_z0 {
        for d in &config.d {
            specs.push(FamilySpec::F3 { d: d.clone(), chi: chi.values.clone() });
        }
    }

    let ordered_pairs: Vec<(&CharacterFunction, &CharacterFunction)> = chars
        .iter()
        .flat_map(|a| chars.iter().map(move |b| (a, b)))
        .filter(|(a, b)| a.index != b.index)
        .collect();

    for (c1, c2) in &ordered_pairs {
        for c in &config.c {
            specs.push(FamilySpec::F4 {
                c: c.clone(),
                chi1: c1.values.clone(),
                chi2: c2.values.clone(),
            });
        }
    }

    let one = Scalar::one();
    let two = Scalar::from_i64(2);
    for q in config.q.iter().filter(|q| !q.is_zero()) {
        for xi in signed_roots(&(&one + &(q * q))) {
            let (p, m) = (&one + &xi, &one - &xi);
            let n1 = q * q - &p * &p;
            let n2 = -(q * q - &m * &m);
            for (c1, c2) in &ordered_pairs {
                let den = &two * q;
                let targets = [(c1.at(z0), n1.clone(), den.clone()), (c2.at(z0), n2.clone(), den)];
                for gamma in gamma_choices(targets, &config.gamma) {
                    specs.push(FamilySpec::F5 {
                        q: q.clone(),
                        xi: xi.clone(),
                        gamma,
                        chi1: c1.values.clone(),
                        chi2: c2.values.clone(),
                    });
                }
            }
        }
    }

    for alpha in &config.alpha {
        for q in &config.q {
            if *q == *alpha || *q == -alpha {
                continue;
            }
            for delta in signed_roots(&(&one + &(q * q) - alpha * alpha)) {
                let (p, m) = (&one + &delta, &one - &delta);
                let (ap, am) = (alpha + q, alpha - q);
                let n1 = &p * &p - &ap * &ap;
                let n2 = &m * &m - &am * &am;
                for (c1, c2) in &ordered_pairs {
                    // χ₁(z₀) = n₁/(2γ(1+δ)), χ₂(z₀) = n₂/(2γ(1−δ))
                    let targets = [(c1.at(z0), n1.clone(), &two * &p), (c2.at(z0), n2.clone(), &two * &m)];
                    for gamma in gamma_choices(targets, &config.gamma) {
                        specs.push(FamilySpec::F6 {
                            alpha: alpha.clone(),
                            q: q.clone(),
                            delta: delta.clone(),
                            gamma,
                            chi1: c1.values.clone(),
                            chi2: c2.values.clone(),
                        });
                    }
                }
            }
        }
    }

    for chi in &nonzero_at_z0 {
        let zero = scalar::zero_table(domain.len());
        let mut additive = vec![zero.clone()];
        additive.extend(additive_basis(domain, Some(chi)).unwrap_or_default().into_iter().map(|a| a.values));
        let mut rhos = vec![zero.clone()];
        rhos.extend(rho_space(domain, chi).into_iter().map(|r| r.values));
        let beta = chi.at(z0).recip().expect("nonzero at z0");
        for a in &additive {
            for rho in &rhos {
                // Ψ = 0 only reproduces family 3 with d = 0
                if *a == zero && *rho == zero {
                    continue;
                }
                for sign in Sign::BOTH {
                    if a[z0].is_zero() {
                        specs.push(FamilySpec::F7 {
                            beta: beta.clone(),
                            chi: chi.values.clone(),
                            additive: a.clone(),
                            rho: rho.clone(),
                            sign,
                        });
                    }
                    specs.push(FamilySpec::F8 {
                        chi: chi.values.clone(),
                        additive: a.clone(),
                        rho: rho.clone(),
                        sign,
                    });
                }
            }
        }
    }

    let mut out: Vec<(FamilySpec, SolutionPair)> = specs
        .into_iter()
        .filter_map(|spec| {
            let pair = build_family(domain, &spec).ok()?;
            (check_kannappan(domain, &pair) == 0.0).then_some((spec, pair))
        })
        .collect();
    out.sort_by_key(|(s, _)| s.number());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn tags(out: &[(FamilySpec, SolutionPair)]) -> Vec<&'static str> {
        let mut t: Vec<_> = out.iter().map(|(s, _)| s.tag()).collect();
        t.dedup();
        t
    }

    #[test]
    fn trivial_semigroup_grid() {
        let d = corpus::trivial();
        let mut cfg = GridConfig::default();
        cfg.set("d", vec![Scalar::zero(), Scalar::from_i64(2), Scalar::i()]).unwrap();
        let out = enumerate_all_families(&d, &cfg).unwrap();
        assert_eq!(tags(&out), vec!["F1", "F3"]);
        for (spec, pair) in &out[1..] {
            let FamilySpec::F3 { d, .. } = spec else { unreachable!() };
            let den = Scalar::one() - d * d;
            assert_eq!(pair.g[0], Scalar::one() / &den);
            assert_eq!(pair.f[0], d / &den);
        }
        assert_eq!(out.len(), 4);
    }

    #[test]
    fn null_semigroup_has_f2() {
        let out = enumerate_all_families(&corpus::null(2), &GridConfig::default()).unwrap();
        let t = tags(&out);
        assert!(t.contains(&"F1") && t.contains(&"F2"));
    }

    #[test]
    fn z2_identity_z0() {
        let out = enumerate_all_families(&corpus::cyclic(2), &GridConfig::default()).unwrap();
        let t = tags(&out);
        assert!(t.starts_with(&["F1", "F3", "F4"]));
        let f3_chars: Vec<_> = out
            .iter()
            .filter_map(|(s, _)| match s {
                FamilySpec::F3 { chi, .. } => Some(chi.clone()),
                _ => None,
            })
            .collect();
        assert!(f3_chars.contains(&vec![Scalar::one(), Scalar::one()]));
        assert!(f3_chars.contains(&vec![Scalar::one(), Scalar::from_i64(-1)]));
    }

    #[test]
    fn windows_are_rejected() {
        let w = SemigroupDomain::naturals_window(4, 1).unwrap();
        assert!(enumerate_all_families(&w, &GridConfig::default()).is_err());
    }
}
