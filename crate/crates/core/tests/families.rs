use kannappan_core::corpus;
use kannappan_core::solutions::{
    build_family, check_kannappan, check_lemma33_identities, enumerate_all_families, lambda_roots,
    Classifier, GridConfig,
};
use kannappan_core::{SemigroupDomain, Tolerance};

fn every_z0() -> Vec<(String, SemigroupDomain)> {
    corpus::corpus()
        .into_iter()
        .flat_map(|(name, d)| {
            d.elements()
                .map(move |z0| (format!("{name}@{z0}"), d.with_z0(z0).unwrap()))
                .collect::<Vec<_>>()
        })
        .collect()
}

#[test]
fn enumerated_pairs_solve_exactly() {
    for (name, d) in every_z0() {
        for (spec, pair) in enumerate_all_families(&d, &GridConfig::default()).unwrap() {
            assert_eq!(check_kannappan(&d, &pair), 0.0, "{name} {spec:?}");
            assert_eq!(build_family(&d, &spec).unwrap(), pair);
        }
    }
}

#[test]
fn enumerated_pairs_round_trip() {
    for (name, d) in every_z0() {
        let classifier = Classifier::new(&d, Tolerance::default()).unwrap();
        for (spec, pair) in enumerate_all_families(&d, &GridConfig::default()).unwrap() {
            let report = classifier
                .classify(&pair)
                .unwrap_or_else(|e| panic!("{name} {spec:?}: {e:?}"));
            let rebuilt = build_family(&d, &report.primary().unwrap().spec).unwrap();
            assert_eq!(rebuilt, pair, "{name} {spec:?}");
        }
    }
}

#[test]
fn float_copies_round_trip() {
    for (name, d) in every_z0() {
        let classifier = Classifier::new(&d, Tolerance::default()).unwrap();
        for (spec, pair) in enumerate_all_families(&d, &GridConfig::default()).unwrap() {
            let pair = pair.to_float();
            let report = classifier
                .classify(&pair)
                .unwrap_or_else(|e| panic!("{name} {spec:?}: {e:?}"));
            let rebuilt = build_family(&d, &report.primary().unwrap().spec).unwrap();
            assert!(pair.distance(&rebuilt) < 1e-9, "{name} {spec:?}");
        }
    }
}

#[test]
fn lemma_identities_on_enumerated_pairs() {
    for (name, d) in every_z0() {
        let z0 = d.z0();
        for (spec, pair) in enumerate_all_families(&d, &GridConfig::default()).unwrap() {
            let r = check_lemma33_identities(&d, &pair);
            let g_nonzero = pair.g.iter().any(|v| !v.is_zero());
            if pair.f[z0].is_zero() {
                if g_nonzero {
                    assert_eq!(r.product_identity, Some(0.0), "{name} {spec:?}");
                    assert_eq!(r.square_identity, Some(0.0), "{name} {spec:?}");
                }
                assert_ne!(r.g_z0_nonzero, Some(false), "{name} {spec:?}");
            } else {
                let mu = r.mu.clone().unwrap_or_else(|| panic!("{name} {spec:?}"));
                assert_eq!(r.mu_residual, Some(0.0), "{name} {spec:?}");
                let (l1, l2) = lambda_roots(&mu);
                assert_eq!(&l1 * &l2, kannappan_core::Scalar::one(), "{name} {spec:?}");
            }
        }
    }
}
