use proptest::prelude::*;
use usefulness_core::entropy::{EstimatorSettings, Method};
use usefulness_core::predictability::{auto_predictability, exogenous_predictability, PredictabilityKind};
use usefulness_core::synth::{gaussian_ar1, gaussian_white, student_t_ar1};

fn maxent() -> EstimatorSettings {
    EstimatorSettings::with_method(Method::MaxEnt)
}

/// `½ log2(1 / (1 − φ²))`: stationary variance over innovation variance.
fn ar1_pr(phi: f64) -> f64 {
    -0.5 * (1.0 - phi * phi).log2()
}

#[test]
fn white_noise_is_unpredictable() {
    let z = gaussian_white(1, 5000, 1.0, 201).unwrap();
    let r = auto_predictability(&z, &maxent()).unwrap();
    assert_eq!(r.kind, PredictabilityKind::Auto);
    assert!(r.pr_bits.abs() < 0.02, "{}", r.pr_bits);
    assert_eq!(r.pr_log_ratio_bits, 2.0 * r.pr_bits);
}

#[test]
fn gaussian_ar1_matches_closed_form() {
    let truth = ar1_pr(0.5);
    assert!((truth - 0.20752).abs() < 1e-5);
    let z = gaussian_ar1(0.5, 1, 10_000, 202).unwrap();
    for method in [Method::MaxEnt, Method::Nonparametric] {
        let r = auto_predictability(&z, &EstimatorSettings::with_method(method)).unwrap();
        assert!((r.pr_bits - truth).abs() / truth < 0.15, "{method}: {}", r.pr_bits);
    }
}

#[test]
fn student_t_noise_is_unpredictable() {
    let z = student_t_ar1(0.0, 4.0, 10_000, 203).unwrap();
    let r = auto_predictability(&z, &maxent()).unwrap();
    assert!(r.pr_bits < 0.03, "{}", r.pr_bits);
}

#[test]
fn model_free_orders_memory() {
    let s = EstimatorSettings::with_method(Method::ModelFree);
    let white = auto_predictability(&gaussian_white(1, 5000, 1.0, 204).unwrap(), &s).unwrap();
    let ar = auto_predictability(&gaussian_ar1(0.8, 1, 5000, 205).unwrap(), &s).unwrap();
    assert!(ar.pr_bits > white.pr_bits + 0.1, "{} vs {}", ar.pr_bits, white.pr_bits);
}

#[test]
fn predictability_grows_with_persistence() {
    let prs: Vec<f64> = [0.0, 0.2, 0.4, 0.6, 0.8]
        .iter()
        .map(|&phi| auto_predictability(&gaussian_ar1(phi, 1, 10_000, 206).unwrap(), &maxent()).unwrap().pr_bits)
        .collect();
    assert!(prs.windows(2).all(|w| w[0] < w[1]), "{prs:?}");
}

#[test]
fn independent_exogenous_series_adds_nothing() {
    let x = gaussian_ar1(0.4, 2, 5000, 207).unwrap();
    let white = gaussian_white(1, 5000, 1.0, 208).unwrap();
    let r = exogenous_predictability(&white, &x, &maxent()).unwrap();
    assert_eq!(r.kind, PredictabilityKind::Exogenous);
    assert!(r.pr_bits.abs() < 0.05, "{}", r.pr_bits);

    let ar = gaussian_ar1(0.5, 1, 5000, 209).unwrap();
    let exo = exogenous_predictability(&ar, &x, &maxent()).unwrap().pr_bits;
    let auto = auto_predictability(&ar, &maxent()).unwrap().pr_bits;
    assert!((exo - auto).abs() < 0.05, "{exo} vs {auto}");
}

#[test]
fn lagged_copy_is_highly_predictable() {
    // y_t = x_{t−1}.
    let raw = gaussian_white(1, 5001, 1.0, 210).unwrap();
    let y = raw.rows(0, 5000).unwrap();
    let x = raw.rows(1, 5001).unwrap();
    let exo = exogenous_predictability(&y, &x, &maxent()).unwrap().pr_bits;
    let auto = auto_predictability(&y, &maxent()).unwrap().pr_bits;
    assert!(exo > 1.0 && exo > 3.0 * auto.max(0.0), "{exo} vs {auto}");
}

#[test]
fn vector_predictability() {
    let z = gaussian_ar1(0.5, 2, 10_000, 211).unwrap();
    let r = auto_predictability(&z, &maxent()).unwrap();
    assert!((r.pr_bits - 2.0 * ar1_pr(0.5)).abs() / (2.0 * ar1_pr(0.5)) < 0.15, "{}", r.pr_bits);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn maxent_predictability_is_non_negative(seed in any::<u64>(), phi in -0.9f64..0.9, p in 1usize..8) {
        let z = gaussian_ar1(phi, 1, 300, seed).unwrap();
        let s = EstimatorSettings { lag: Some(p), ..maxent() };
        prop_assert!(auto_predictability(&z, &s).unwrap().pr_bits >= -1e-9);
    }

    #[test]
    fn maxent_predictability_is_affine_invariant(
        seed in any::<u64>(),
        alpha in prop_oneof![-30.0f64..-0.01, 0.01f64..30.0],
        beta in -10.0f64..10.0,
    ) {
        let z = gaussian_ar1(0.6, 1, 400, seed).unwrap();
        let s = EstimatorSettings { lag: Some(3), normalize: false, ..maxent() };
        let moved = z.scale_columns(&[alpha]).unwrap().shift_columns(&[beta]).unwrap();
        let a = auto_predictability(&z, &s).unwrap().pr_bits;
        let b = auto_predictability(&moved, &s).unwrap().pr_bits;
        prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
    }

    #[test]
    fn exogenous_dominates_auto(seed in any::<u64>(), phi in -0.8f64..0.8) {
        let z = gaussian_ar1(phi, 3, 2000, seed).unwrap();
        let y = z.select(&[0]).unwrap();
        let x = z.without(0).unwrap();
        let auto = auto_predictability(&y, &maxent()).unwrap().pr_bits;
        let exo = exogenous_predictability(&y, &x, &maxent()).unwrap().pr_bits;
        prop_assert!(exo >= auto - 0.05, "{} < {}", exo, auto);
    }
}
