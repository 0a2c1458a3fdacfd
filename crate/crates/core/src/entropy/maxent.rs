use std::f64::consts::{E, PI};

use super::{Diagnostics, EntropyRateEstimate, MaxEntDiagnostics, Method};
use crate::error::{Error, Result};
use crate::linalg::factor_with_shrinkage;
use crate::panel::{block_autocov_matrix, cap_lag, default_lag, sample_autocovariance, ReturnsPanel};

/// Lag to use on a `len × dim` panel. A requested lag must satisfy
/// `(p + 1) · dim < len`; the default lag is capped to fit and must stay
/// at least 1.
pub fn resolve_lag(requested: Option<usize>, len: usize, dim: usize) -> Result<usize> {
    let fits = |p: usize| (p + 1) * dim < len;
    match requested {
        Some(p) if fits(p) => Ok(p),
        Some(p) => Err(Error::InsufficientSamples(format!(
            "lag {p} needs more than {} observations for {dim} series, got {len}",
            (p + 1) * dim
        ))),
        None => match cap_lag(default_lag(len), len, dim) {
            Some(p) if p >= 1 => Ok(p),
            _ => Err(Error::InsufficientSamples(format!(
                "{len} observations cannot support a lag of 1 for {dim} series"
            ))),
        },
    }
}

/// Log-determinants from one factorization of `Σ_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntFit {
    pub lag: usize,
    pub dim: usize,
    pub shrinkage: Option<f64>,
    /// `log2 det Ĉ(0)`, from the leading `n` pivots.
    pub log2_det_c0: f64,
    /// `log2 det Σ_p − log2 det Σ_{p−1}`, from the trailing `n` pivots.
    pub log2_det_ratio: f64,
}

impl MaxEntFit {
    /// `(n/2) log2(2πe) + ½ log2 det Σ_p / det Σ_{p−1}`.
    pub fn rate(&self) -> f64 {
        0.5 * self.dim as f64 * (2.0 * PI * E).log2() + 0.5 * self.log2_det_ratio
    }

    /// Gaussian entropy of one observation, `½ log2 det(2πe Ĉ(0))`.
    pub fn marginal(&self) -> f64 {
        0.5 * self.dim as f64 * (2.0 * PI * E).log2() + 0.5 * self.log2_det_c0
    }
}

pub fn maxent_fit(panel: &ReturnsPanel, lag: usize) -> Result<MaxEntFit> {
    let n = panel.dim();
    let lag = resolve_lag(Some(lag), panel.len(), n)?;
    let acov = sample_autocovariance(panel, lag)?;
    let sigma = block_autocov_matrix(&acov, lag)?;
    let chol = factor_with_shrinkage(&sigma.matrix)?;
    Ok(MaxEntFit {
        lag,
        dim: n,
        shrinkage: chol.shrinkage,
        log2_det_c0: chol.factor.log2_pivot_sum(0..n),
        log2_det_ratio: chol.factor.log2_pivot_sum(lag * n..(lag + 1) * n),
    })
}

/// Maximum-entropy rate with lag `p`, or the capped default lag.
pub fn maxent_entropy_rate(panel: &ReturnsPanel, lag: Option<usize>) -> Result<EntropyRateEstimate> {
    let lag = resolve_lag(lag, panel.len(), panel.dim())?;
    let fit = maxent_fit(panel, lag)?;
    Ok(EntropyRateEstimate {
        bits_per_period: fit.rate(),
        method: Method::MaxEnt,
        scale_adjustment_bits: 0.0,
        diagnostics: Diagnostics::MaxEnt(MaxEntDiagnostics {
            lag,
            shrinkage: fit.shrinkage,
            log2_det_c0: fit.log2_det_c0,
            log2_det_ratio: fit.log2_det_ratio,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lag_resolution() {
        assert_eq!(resolve_lag(None, 2000, 1).unwrap(), 25);
        assert_eq!(resolve_lag(None, 2000, 51).unwrap(), 25);
        // (p + 1) · 100 < 2000 caps p at 18.
        assert_eq!(resolve_lag(None, 2000, 100).unwrap(), 18);
        assert_eq!(resolve_lag(Some(0), 10, 3).unwrap(), 0);
        assert!(matches!(resolve_lag(Some(3), 10, 3), Err(Error::InsufficientSamples(_))));
        assert!(matches!(resolve_lag(None, 10, 5), Err(Error::InsufficientSamples(_))));
    }
}
