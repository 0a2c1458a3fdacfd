//! Run configuration. Values come from the built-in defaults, then an
//! optional TOML or JSON file, then command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use usefulness_core::entropy::{EstimatorSettings, Method, Taper, WelchConfig};
use usefulness_core::panel::Period;
use usefulness_core::passive::NormalGammaPrior;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    /// Incremental diversification against the rest of the panel.
    Id,
    /// Order-q incremental diversification.
    #[value(alias = "id_q")]
    IdQ,
    /// Auto and exogenous predictability.
    Pr,
    /// Impact on the tails of the pool.
    It,
    /// Bidirectional Sharpe ratio, suitability score and tests.
    Passive,
}

impl Analysis {
    pub const ALL: [Analysis; 5] = [Analysis::Id, Analysis::IdQ, Analysis::Pr, Analysis::It, Analysis::Passive];

    pub fn tag(self) -> &'static str {
        match self {
            Analysis::Id => "id",
            Analysis::IdQ => "id_q",
            Analysis::Pr => "pr",
            Analysis::It => "it",
            Analysis::Passive => "passive",
        }
    }
}

/// Entropy-rate estimator block. The resampling seed is not configurable
/// here; it is derived from the run seed per analysis and asset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorConfig {
    pub method: Method,
    pub precision: Option<f64>,
    pub resamples: usize,
    pub lag: Option<usize>,
    pub window: Option<usize>,
    pub overlap: f64,
    pub taper: Taper,
    pub normalize: bool,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        let s = EstimatorSettings::default();
        Self {
            method: s.method,
            precision: s.precision,
            resamples: s.resamples,
            lag: s.lag,
            window: s.welch.window,
            overlap: s.welch.overlap,
            taper: s.welch.taper,
            normalize: s.normalize,
        }
    }
}

impl EstimatorConfig {
    pub fn settings(&self, seed: u64) -> EstimatorSettings {
        EstimatorSettings {
            method: self.method,
            precision: self.precision,
            resamples: self.resamples,
            seed,
            welch: WelchConfig { window: self.window, overlap: self.overlap, taper: self.taper },
            lag: self.lag,
            normalize: self.normalize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrderQConfig {
    pub q: usize,
    pub partitions: usize,
}

impl Default for OrderQConfig {
    fn default() -> Self {
        Self { q: 5, partitions: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TailConfig {
    /// Moment order `p ≥ 2`.
    pub order: u32,
    /// Per-period risk-free rate of the cash leg.
    pub risk_free: f64,
}

impl Default for TailConfig {
    fn default() -> Self {
        Self { order: 2, risk_free: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PassiveConfig {
    pub prior: NormalGammaPrior,
    pub p_value: f64,
    /// Effective number of trials for the multi-trial test.
    pub m_eff: Option<f64>,
    /// Monthly cost rate `r_c`.
    pub cost_rate: f64,
    /// Monthly risk-free rate `r_f`.
    pub risk_free: f64,
}

impl Default for PassiveConfig {
    fn default() -> Self {
        Self { prior: NormalGammaPrior::default(), p_value: 0.05, m_eff: None, cost_rate: 0.0, risk_free: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    /// Assets to evaluate; every column when empty.
    pub candidates: Vec<String>,
    pub analyses: Vec<Analysis>,
    pub period: Period,
    pub drop_invalid_rows: bool,
    pub seed: u64,
    pub estimator: EstimatorConfig,
    pub order_q: OrderQConfig,
    pub tails: TailConfig,
    pub passive: PassiveConfig,
    pub output: Option<PathBuf>,
    pub summary_csv: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            candidates: Vec::new(),
            analyses: Analysis::ALL.to_vec(),
            period: Period::Daily,
            drop_invalid_rows: false,
            seed: 0,
            estimator: EstimatorConfig::default(),
            order_q: OrderQConfig::default(),
            tails: TailConfig::default(),
            passive: PassiveConfig::default(),
            output: None,
            summary_csv: None,
        }
    }
}

impl RunConfig {
    /// Reads a config file; `.json` files are JSON, anything else TOML.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let parsed = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn wants(&self, a: Analysis) -> bool {
        self.analyses.contains(&a)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(CliError::Config(msg));
        if self.analyses.is_empty() {
            return fail("no analyses selected".into());
        }
        let e = &self.estimator;
        if e.resamples == 0 {
            return fail("estimator.resamples must be at least 1".into());
        }
        if let Some(m) = e.precision {
            if !(m > 0.0 && m.is_finite()) {
                return fail(format!("estimator.precision = {m} must be positive"));
            }
        }
        if !(0.0..1.0).contains(&e.overlap) {
            return fail(format!("estimator.overlap = {} must lie in [0, 1)", e.overlap));
        }
        if self.order_q.q == 0 || self.order_q.partitions == 0 {
            return fail("order_q.q and order_q.partitions must be at least 1".into());
        }
        if self.tails.order < 2 {
            return fail(format!("tails.order = {} must be at least 2", self.tails.order));
        }
        let p = &self.passive;
        if !(p.p_value > 0.0 && p.p_value < 1.0) {
            return fail(format!("passive.p_value = {} must lie in (0, 1)", p.p_value));
        }
        if let Some(m) = p.m_eff {
            if !(m >= 1.0 && m.is_finite()) {
                return fail(format!("passive.m_eff = {m} must be at least 1"));
            }
        }
        p.prior.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }
}
