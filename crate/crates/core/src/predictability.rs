//! Auto- and exogenous predictability: the reduction in uncertainty about
//! the next return from the past of the series (and of other series).

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::entropy::{Diagnostics, EntropyRateEstimate, EstimatorSettings, Method, ResolvedEstimator};
use crate::error::{Error, Result};
use crate::linalg::factor_with_shrinkage;
use crate::panel::{sample_autocovariance, ReturnsPanel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictabilityKind {
    Auto,
    Exogenous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictabilityComponents {
    /// Entropy of a single observation `h(y_t)`.
    pub h_marginal: f64,
    /// `h({y})` for auto, `h({y, x}) − h({x})` for exogenous.
    pub h_rate: f64,
    pub rate_estimate: EntropyRateEstimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_joint: Option<EntropyRateEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_x: Option<EntropyRateEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictabilityResult {
    pub pr_bits: f64,
    /// `2 · pr_bits`: the log ratio of marginal to innovation variance
    /// without the ½ factor.
    pub pr_log_ratio_bits: f64,
    pub kind: PredictabilityKind,
    pub method: Method,
    pub estimator: ResolvedEstimator,
    pub components: PredictabilityComponents,
}

/// `h(y_t)` matched to the estimator that produced `rate`: the Gaussian
/// entropy of `Ĉ(0)` for the spectral and maximum-entropy estimators, the
/// discretized plug-in entropy at the same precision for the model-free one.
fn marginal_entropy(y: &ReturnsPanel, rate: &EntropyRateEstimate) -> Result<f64> {
    let n = y.dim() as f64;
    let gauss = 0.5 * n * (2.0 * PI * E).log2();
    Ok(match &rate.diagnostics {
        Diagnostics::MaxEnt(d) => gauss + 0.5 * d.log2_det_c0 + rate.scale_adjustment_bits,
        Diagnostics::ModelFree(d) => d.plugin_entropy_bits - d.precision * n + rate.scale_adjustment_bits,
        Diagnostics::Nonparametric(_) => {
            let c0 = sample_autocovariance(y, 0)?;
            gauss + 0.5 * factor_with_shrinkage(c0.lag(0))?.factor.log2_det()
        }
    })
}

fn result(
    kind: PredictabilityKind,
    est: ResolvedEstimator,
    h_marginal: f64,
    h_rate: f64,
    rate_estimate: EntropyRateEstimate,
    h_joint: Option<EntropyRateEstimate>,
    h_x: Option<EntropyRateEstimate>,
) -> PredictabilityResult {
    let pr = h_marginal - h_rate;
    PredictabilityResult {
        pr_bits: pr,
        pr_log_ratio_bits: 2.0 * pr,
        kind,
        method: est.method(),
        estimator: est,
        components: PredictabilityComponents { h_marginal, h_rate, rate_estimate, h_joint, h_x },
    }
}

/// `PR = h(y_t) − h({y_t})`. Panels with several columns give the
/// vector-valued measure.
pub fn auto_predictability(y: &ReturnsPanel, settings: &EstimatorSettings) -> Result<PredictabilityResult> {
    let est = settings.resolve(y)?;
    let rate = est.entropy_rate(y)?;
    let h_marginal = marginal_entropy(y, &rate)?;
    Ok(result(PredictabilityKind::Auto, est, h_marginal, rate.bits_per_period, rate, None, None))
}

/// `PR(y | x) = h(y_t) − [h({y, x}) − h({x})]`, all terms with the
/// hyperparameters resolved on the joint panel.
pub fn exogenous_predictability(
    y: &ReturnsPanel,
    x: &ReturnsPanel,
    settings: &EstimatorSettings,
) -> Result<PredictabilityResult> {
    if y.len() != x.len() {
        return Err(Error::RowMisalignment { left: y.len(), right: x.len() });
    }
    let joint = y.hstack(x)?;
    let est = settings.resolve(&joint)?;
    let (h_joint, (h_y, h_x)) =
        rayon::join(|| est.entropy_rate(&joint), || rayon::join(|| est.entropy_rate(y), || est.entropy_rate(x)));
    let (h_joint, h_y, h_x) = (h_joint?, h_y?, h_x?);
    let h_marginal = marginal_entropy(y, &h_y)?;
    let conditional = h_joint.bits_per_period - h_x.bits_per_period;
    Ok(result(PredictabilityKind::Exogenous, est, h_marginal, conditional, h_y, Some(h_joint), Some(h_x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn maxent_pr_is_half_log_variance_ratio() {
        // With p = 1 on a single series, det Σ_1 / det Σ_0 = γ0 − γ1²/γ0.
        let xs = vec![0.3, -0.1, 0.8, 0.2, -0.5, 0.4, 0.9, -0.3, 0.1, 0.0, 0.6, -0.2];
        let y = ReturnsPanel::from_series("y", xs).unwrap();
        let s = EstimatorSettings { lag: Some(1), normalize: false, ..EstimatorSettings::default() };
        let pr = auto_predictability(&y, &s).unwrap();
        let acov = sample_autocovariance(&y, 1).unwrap();
        let (g0, g1) = (acov.lag(0)[(0, 0)], acov.lag(1)[(0, 0)]);
        let oracle = 0.5 * (g0 / (g0 - g1 * g1 / g0)).log2();
        assert_relative_eq!(pr.pr_bits, oracle, epsilon = 1e-12);
        assert_relative_eq!(pr.pr_log_ratio_bits, 2.0 * oracle, epsilon = 1e-12);
    }

    #[test]
    fn misaligned_rows() {
        let y = ReturnsPanel::from_series("y", vec![0.1, 0.2, 0.3]).unwrap();
        let x = ReturnsPanel::from_series("x", vec![0.1, 0.2]).unwrap();
        assert!(matches!(
            exogenous_predictability(&y, &x, &EstimatorSettings::default()),
            Err(Error::RowMisalignment { left: 3, right: 2 })
        ));
    }
}
