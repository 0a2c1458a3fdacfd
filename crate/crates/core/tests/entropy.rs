use std::f64::consts::{E, PI};

use nalgebra::DMatrix;
use proptest::prelude::*;
use usefulness_core::entropy::{
    default_precision, maxent_entropy_rate, model_free_entropy_rate, nonparametric_entropy_rate,
    spectral_density_welch, Diagnostics, Taper, WelchConfig,
};
use usefulness_core::panel::{sample_autocovariance, ReturnsPanel, UNIT_BIT_VARIANCE};
use usefulness_core::synth::{gaussian_ar1, gaussian_white};

fn gauss_bits(var: f64) -> f64 {
    0.5 * (2.0 * PI * E * var).log2()
}

fn rel(est: f64, truth: f64) -> f64 {
    (est - truth).abs() / truth.abs()
}

#[test]
fn model_free_gaussian_white_noise() {
    let z = gaussian_white(1, 5000, 1.0, 11).unwrap();
    let m = default_precision(&z).unwrap();
    let est = model_free_entropy_rate(&z, m, 5, 3).unwrap();
    assert!(rel(est.bits_per_period, gauss_bits(1.0)) < 0.10, "{}", est.bits_per_period);
}

#[test]
fn model_free_constant_series_is_minus_mn() {
    let z = ReturnsPanel::from_series("c", vec![0.3; 200]).unwrap();
    let est = model_free_entropy_rate(&z, 2.0, 4, 0).unwrap();
    assert_eq!(est.bits_per_period, -2.0);
}

#[test]
fn model_free_is_seed_deterministic() {
    let z = gaussian_ar1(0.5, 2, 800, 4).unwrap();
    let a = model_free_entropy_rate(&z, 2.0, 5, 9).unwrap();
    let b = model_free_entropy_rate(&z, 2.0, 5, 9).unwrap();
    assert_eq!(a, b);
}

#[test]
fn model_free_iid_complexity_ratio_near_one() {
    let z = gaussian_white(1, 4000, 1.0, 21).unwrap();
    let est = model_free_entropy_rate(&z, default_precision(&z).unwrap(), 5, 1).unwrap();
    let Diagnostics::ModelFree(d) = est.diagnostics else { panic!() };
    let ratio = d.complexity as f64 / d.mean_resampled_complexity;
    assert!((ratio - 1.0).abs() < 0.05, "{ratio}");
    assert!(rel(est.bits_per_period, d.plugin_entropy_bits - d.precision) < 0.05);
}

#[test]
fn welch_white_noise_is_flat() {
    let z = gaussian_white(1, 5000, 1.0, 5).unwrap();
    let cfg = WelchConfig { window: Some(100), ..WelchConfig::default() };
    let sd = spectral_density_welch(&z, &cfg).unwrap();
    let flat = 1.0 / (2.0 * PI);
    let worst = sd.values.iter().map(|f| rel(f[(0, 0)].re, flat)).fold(0.0, f64::max);
    assert!(worst < 0.30, "{worst}");
}

#[test]
fn welch_ar1_peak_ratio() {
    // σ²/(2π|1 − φe^{−iω}|²) gives f(0)/f(π) = ((1 + φ)/(1 − φ))² = 9.
    let z = gaussian_ar1(0.5, 1, 10_000, 6).unwrap();
    let cfg = WelchConfig { window: Some(100), ..WelchConfig::default() };
    let sd = spectral_density_welch(&z, &cfg).unwrap();
    let ratio = sd.values[0][(0, 0)].re / sd.values[50][(0, 0)].re;
    assert!(rel(ratio, 9.0) < 0.25, "{ratio}");
}

#[test]
fn welch_density_is_hermitian_psd() {
    let z = gaussian_ar1(0.3, 3, 3000, 8).unwrap();
    let sd = spectral_density_welch(&z, &WelchConfig::default()).unwrap();
    for f in &sd.values {
        assert!((f - f.adjoint()).norm() < 1e-14);
        let min = f.clone().symmetric_eigenvalues().min();
        assert!(min > -1e-8, "{min}");
    }
}

#[test]
fn welch_integrates_to_lag_zero_covariance() {
    let z = gaussian_ar1(0.5, 2, 6000, 2).unwrap();
    let sd = spectral_density_welch(&z, &WelchConfig::default()).unwrap();
    let w = sd.window as f64;
    let c0 = sample_autocovariance(&z, 0).unwrap();
    for i in 0..2 {
        let s: f64 = sd.values.iter().map(|f| f[(i, i)].re).sum::<f64>() * 2.0 * PI / w;
        assert!(rel(s, c0.lag(0)[(i, i)]) < 0.05);
    }
}

#[test]
fn nonparametric_gaussian_cases() {
    let truth = gauss_bits(1.0);
    let white = gaussian_white(1, 5000, 1.0, 31).unwrap();
    let h = nonparametric_entropy_rate(&white, &WelchConfig::default()).unwrap();
    assert!(rel(h.bits_per_period, truth) < 0.05, "{}", h.bits_per_period);

    let ar = gaussian_ar1(0.5, 1, 10_000, 32).unwrap();
    let h = nonparametric_entropy_rate(&ar, &WelchConfig::default()).unwrap();
    assert!(rel(h.bits_per_period, truth) < 0.05, "{}", h.bits_per_period);

    let pair = gaussian_ar1(0.5, 2, 10_000, 33).unwrap();
    let h = nonparametric_entropy_rate(&pair, &WelchConfig::default()).unwrap();
    assert!(rel(h.bits_per_period, 2.0 * truth) < 0.05, "{}", h.bits_per_period);
}

#[test]
fn maxent_gaussian_cases() {
    let white = gaussian_white(1, 5000, UNIT_BIT_VARIANCE.sqrt(), 41).unwrap();
    let h = maxent_entropy_rate(&white, None).unwrap();
    assert!((h.bits_per_period - 1.0).abs() < 0.05, "{}", h.bits_per_period);

    let ar = gaussian_ar1(0.5, 1, 10_000, 42).unwrap();
    let h = maxent_entropy_rate(&ar, None).unwrap();
    assert!((h.bits_per_period - gauss_bits(1.0)).abs() < 0.05, "{}", h.bits_per_period);
}

#[test]
fn nonparametric_and_maxent_agree_on_ar1() {
    let ar = gaussian_ar1(0.5, 1, 5000, 51).unwrap();
    let a = maxent_entropy_rate(&ar, None).unwrap().bits_per_period;
    let b = nonparametric_entropy_rate(&ar, &WelchConfig::default()).unwrap().bits_per_period;
    assert!(rel(b, a) < 0.05, "{a} vs {b}");
}

#[test]
fn rectangular_taper_also_estimates_white_noise() {
    let white = gaussian_white(1, 5000, 1.0, 61).unwrap();
    let cfg = WelchConfig { taper: Taper::Rectangular, ..WelchConfig::default() };
    let h = nonparametric_entropy_rate(&white, &cfg).unwrap();
    assert!(rel(h.bits_per_period, gauss_bits(1.0)) < 0.05);
}

fn panel_strategy() -> impl Strategy<Value = ReturnsPanel> {
    (1usize..4, 60usize..160, any::<u64>(), -0.8f64..0.8)
        .prop_map(|(n, len, seed, phi)| gaussian_ar1(phi, n, len, seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn maxent_permutation_invariant(z in panel_strategy(), p in 0usize..4) {
        let n = z.dim();
        let rev: Vec<usize> = (0..n).rev().collect();
        let a = maxent_entropy_rate(&z, Some(p)).unwrap().bits_per_period;
        let b = maxent_entropy_rate(&z.select(&rev).unwrap(), Some(p)).unwrap().bits_per_period;
        prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
    }

    #[test]
    fn maxent_scaling_identity(z in panel_strategy(), raw in proptest::collection::vec(0.05f64..20.0, 3), neg in any::<[bool; 3]>()) {
        let n = z.dim();
        let factors: Vec<f64> = (0..n).map(|i| if neg[i] { -raw[i] } else { raw[i] }).collect();
        let a = maxent_entropy_rate(&z, Some(2)).unwrap().bits_per_period;
        let b = maxent_entropy_rate(&z.scale_columns(&factors).unwrap(), Some(2)).unwrap().bits_per_period;
        let shift: f64 = factors.iter().map(|f| f.abs().log2()).sum();
        prop_assert!((b - a - shift).abs() < 1e-9, "{} vs {}", b - a, shift);
    }

    #[test]
    fn maxent_lag_zero_is_marginal_gaussian(z in panel_strategy()) {
        let h = maxent_entropy_rate(&z, Some(0)).unwrap().bits_per_period;
        let n = z.dim();
        let c0 = sample_autocovariance(&z, 0).unwrap().lag(0).clone();
        let scaled: DMatrix<f64> = c0 * (2.0 * PI * E);
        let oracle = 0.5 * scaled.determinant().log2();
        prop_assert!((h - oracle).abs() < 1e-9, "{} vs {} (n = {})", h, oracle, n);
    }

    #[test]
    fn maxent_non_increasing_in_lag(z in panel_strategy()) {
        let mut prev = f64::INFINITY;
        for p in 0..=6 {
            let h = maxent_entropy_rate(&z, Some(p)).unwrap().bits_per_period;
            prop_assert!(h <= prev + 1e-9, "p = {}: {} > {}", p, h, prev);
            prev = h;
        }
    }

    #[test]
    fn maxent_normalized_bound(z in panel_strategy()) {
        let norm = usefulness_core::panel::normalize_variance(&z, UNIT_BIT_VARIANCE).unwrap();
        let h = maxent_entropy_rate(&norm.panel, None).unwrap().bits_per_period;
        prop_assert!(h <= z.dim() as f64 + 1e-6);
    }
}
