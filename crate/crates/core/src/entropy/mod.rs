//! Differential entropy rate estimators.
//!
//! Three estimators share one result type:
//!
//! * [`model_free_entropy_rate`] discretizes the panel and corrects the plug-in
//!   symbol entropy by the ratio of Lempel-Ziv complexities of the observed
//!   and i.i.d.-resampled sequences.
//! * [`nonparametric_entropy_rate`] integrates the log-determinant of a Welch
//!   estimate of the spectral density.
//! * [`maxent_entropy_rate`] is the rate of the Gaussian autoregression that
//!   matches the first `p` sample autocovariances.
//!
//! Differences of estimates (mutual information, predictability) must use
//! the same hyperparameters for every term. [`EstimatorSettings::resolve`]
//! fixes them once from the largest panel involved and the resulting
//! [`ResolvedEstimator`] is then applied to each sub-panel.

mod discrete;
mod lz76;
mod maxent;
mod model_free;
mod spectral;
mod student;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use discrete::{default_precision, discretize, plugin_discrete_entropy, SymbolSequence};
pub use lz76::{lz76_complexity, lz76_count, lz76_str, Lz76};
pub use maxent::{maxent_entropy_rate, maxent_fit, resolve_lag, MaxEntFit};
pub use model_free::model_free_entropy_rate;
pub use spectral::{
    default_window, nonparametric_entropy_rate, spectral_density_welch, SpectralDensity, Taper, WelchConfig,
};
pub use student::student_t_entropy;

use crate::error::{Error, Result};
use crate::panel::{normalize_variance, ReturnsPanel, UNIT_BIT_VARIANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ModelFree,
    Nonparametric,
    #[serde(rename = "maxent")]
    MaxEnt,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::ModelFree, Method::Nonparametric, Method::MaxEnt];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::ModelFree => "model_free",
            Method::Nonparametric => "nonparametric",
            Method::MaxEnt => "maxent",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "model_free" => Ok(Method::ModelFree),
            "nonparametric" => Ok(Method::Nonparametric),
            "maxent" => Ok(Method::MaxEnt),
            _ => Err(Error::InvalidParam(format!("unknown estimator method {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// Fewer than 100 observations.
    ShortSample { len: usize },
    /// Every character opened a new phrase: `c(T) = T`, the sample is too
    /// short for the chosen precision.
    SaturatedComplexity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFreeDiagnostics {
    pub precision: f64,
    pub resamples: usize,
    pub seed: u64,
    pub complexity: usize,
    pub resampled_complexities: Vec<usize>,
    pub mean_resampled_complexity: f64,
    pub plugin_entropy_bits: f64,
    pub distinct_symbols: usize,
    /// `c(T) log2(T) / T − m n`, the slower direct estimate, for reference.
    pub direct_lz_rate_bits: f64,
    pub warnings: Vec<Warning>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonparametricDiagnostics {
    pub window: usize,
    pub overlap: f64,
    pub taper: Taper,
    pub segments: usize,
    pub quadrature_nodes: usize,
    /// Spectral eigenvalues raised to the clipping floor.
    pub clipped_eigenvalues: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxEntDiagnostics {
    pub lag: usize,
    pub shrinkage: Option<f64>,
    pub log2_det_c0: f64,
    /// `log2 det Σ_p − log2 det Σ_{p−1}`.
    pub log2_det_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Diagnostics {
    ModelFree(ModelFreeDiagnostics),
    Nonparametric(NonparametricDiagnostics),
    #[serde(rename = "maxent")]
    MaxEnt(MaxEntDiagnostics),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyRateEstimate {
    pub bits_per_period: f64,
    pub method: Method,
    /// `−Σ log2 factor_i` added back after estimating on a variance-normalized
    /// copy of the panel; zero when no normalization took place.
    pub scale_adjustment_bits: f64,
    pub diagnostics: Diagnostics,
}

/// User-facing estimator configuration. Unset fields get data-driven
/// defaults in [`EstimatorSettings::resolve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorSettings {
    pub method: Method,
    /// Discretization precision `m` (model-free).
    pub precision: Option<f64>,
    /// Number of resampled sequences `k` (model-free).
    pub resamples: usize,
    pub seed: u64,
    pub welch: WelchConfig,
    /// Autoregressive lag `p` (maxent).
    pub lag: Option<usize>,
    /// Rescale every column to variance `2/(πe)` before estimating.
    pub normalize: bool,
}

impl Default for EstimatorSettings {
    fn default() -> Self {
        Self {
            method: Method::MaxEnt,
            precision: None,
            resamples: 5,
            seed: 0,
            welch: WelchConfig::default(),
            lag: None,
            normalize: true,
        }
    }
}

impl EstimatorSettings {
    pub fn with_method(method: Method) -> Self {
        Self { method, ..Self::default() }
    }

    /// Fixes every hyperparameter from `reference`, normally the widest
    /// panel of a computation (the joint panel of a mutual information).
    pub fn resolve(&self, reference: &ReturnsPanel) -> Result<ResolvedEstimator> {
        let params = match self.method {
            Method::ModelFree => {
                if self.resamples == 0 {
                    return Err(Error::InvalidParam("at least one resample is required".into()));
                }
                let precision = match self.precision {
                    Some(m) if m.is_finite() => m,
                    Some(m) => return Err(Error::InvalidParam(format!("precision {m} is not finite"))),
                    None if self.normalize => {
                        default_precision(&normalize_variance(reference, UNIT_BIT_VARIANCE)?.panel)?
                    }
                    None => default_precision(reference)?,
                };
                Params::ModelFree { precision, resamples: self.resamples, seed: self.seed }
            }
            Method::Nonparametric => {
                let window = self.welch.resolve_window(reference.len())?;
                Params::Nonparametric { welch: WelchConfig { window: Some(window), ..self.welch } }
            }
            Method::MaxEnt => Params::MaxEnt { lag: resolve_lag(self.lag, reference.len(), reference.dim())? },
        };
        Ok(ResolvedEstimator { params, normalize: self.normalize })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Params {
    ModelFree {
        precision: f64,
        resamples: usize,
        seed: u64,
    },
    Nonparametric {
        welch: WelchConfig,
    },
    #[serde(rename = "maxent")]
    MaxEnt {
        lag: usize,
    },
}

/// Estimator with every hyperparameter pinned.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolvedEstimator {
    pub params: Params,
    pub normalize: bool,
}

impl ResolvedEstimator {
    pub fn method(&self) -> Method {
        match self.params {
            Params::ModelFree { .. } => Method::ModelFree,
            Params::Nonparametric { .. } => Method::Nonparametric,
            Params::MaxEnt { .. } => Method::MaxEnt,
        }
    }

    /// Entropy rate of `panel` in its own units. With normalization on, the
    /// estimate is taken on the rescaled panel and the log-Jacobian of the
    /// rescaling is added back.
    pub fn entropy_rate(&self, panel: &ReturnsPanel) -> Result<EntropyRateEstimate> {
        if !self.normalize {
            return self.raw(panel);
        }
        let norm = normalize_variance(panel, UNIT_BIT_VARIANCE)?;
        let adjustment: f64 = -norm.factors.iter().map(|f| f.log2()).sum::<f64>();
        let mut est = self.raw(&norm.panel)?;
        est.bits_per_period += adjustment;
        est.scale_adjustment_bits = adjustment;
        Ok(est)
    }

    fn raw(&self, panel: &ReturnsPanel) -> Result<EntropyRateEstimate> {
        match self.params {
            Params::ModelFree { precision, resamples, seed } => {
                model_free_entropy_rate(panel, precision, resamples, seed)
            }
            Params::Nonparametric { welch } => nonparametric_entropy_rate(panel, &welch),
            Params::MaxEnt { lag } => maxent_entropy_rate(panel, Some(lag)),
        }
    }
}

/// Resolves `settings` on `panel` itself and estimates its entropy rate.
pub fn entropy_rate(panel: &ReturnsPanel, settings: &EstimatorSettings) -> Result<EntropyRateEstimate> {
    settings.resolve(panel)?.entropy_rate(panel)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
            assert_eq!(serde_json::to_value(m).unwrap(), m.as_str());
        }
        assert_eq!("model-free".parse::<Method>().unwrap(), Method::ModelFree);
        assert!("burg".parse::<Method>().is_err());
    }

    #[test]
    fn settings_reject_unknown_keys() {
        let ok: EstimatorSettings = serde_json::from_str(r#"{"method":"nonparametric","lag":3}"#).unwrap();
        assert_eq!(ok.method, Method::Nonparametric);
        assert_eq!(ok.resamples, 5);
        assert!(serde_json::from_str::<EstimatorSettings>(r#"{"lags":3}"#).is_err());
    }
}
