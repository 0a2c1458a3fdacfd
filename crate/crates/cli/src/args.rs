//! Command-line surface. Every `analyze` flag overrides the matching
//! [`RunConfig`] field after the optional config file has been applied.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use usefulness_core::entropy::{Method, Taper};
use usefulness_core::panel::Period;

use crate::config::{Analysis, RunConfig};
use crate::error::Result;

#[derive(Debug, Parser)]
#[command(name = "usefulness", version, about = "Usefulness analytics for return series")]
pub struct Cli {
    /// Worker threads for per-asset analyses; all cores when unset.
    #[arg(long, global = true, env = "USEFULNESS_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score candidate columns of a returns panel against the rest.
    Analyze(Box<AnalyzeArgs>),
    /// Generate a synthetic panel as CSV.
    Simulate(SimulateArgs),
    /// Suitability score and Sharpe-ratio tests against a reference set.
    SpiTest(SpiTestArgs),
    /// Write plot-ready CSV series.
    Figures(FiguresArgs),
}

pub fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse().map_err(|_| format!("expected one of maxent, nonparametric, model-free; got `{s}`"))
}

pub fn parse_taper(s: &str) -> std::result::Result<Taper, String> {
    match s {
        "hann" => Ok(Taper::Hann),
        "rectangular" => Ok(Taper::Rectangular),
        _ => Err(format!("expected hann or rectangular; got `{s}`")),
    }
}

/// `daily`, `monthly`, or a sampling interval in seconds.
pub fn parse_period(s: &str) -> std::result::Result<Period, String> {
    match s {
        "daily" => Ok(Period::Daily),
        "monthly" => Ok(Period::Monthly),
        _ => s
            .parse::<u64>()
            .ok()
            .filter(|&v| v > 0)
            .map(Period::Custom)
            .ok_or_else(|| format!("expected daily, monthly or a positive number of seconds; got `{s}`")),
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct PriorArgs {
    #[arg(long)]
    pub mu0: Option<f64>,
    #[arg(long)]
    pub nu0: Option<f64>,
    #[arg(long)]
    pub alpha0: Option<f64>,
    #[arg(long)]
    pub beta0: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct AnalyzeArgs {
    /// TOML or JSON run configuration; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Returns panel CSV.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Candidate column; repeat for several. Every column when omitted.
    #[arg(long = "candidate")]
    pub candidates: Vec<String>,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub analyses: Option<Vec<Analysis>>,
    #[arg(long, value_parser = parse_period)]
    pub period: Option<Period>,
    #[arg(long)]
    pub drop_invalid_rows: bool,
    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long, value_parser = parse_method)]
    pub method: Option<Method>,
    /// Model-free discretization precision `m`.
    #[arg(long)]
    pub precision: Option<f64>,
    /// Model-free resampled sequences `k`.
    #[arg(long)]
    pub resamples: Option<usize>,
    /// Maximum-entropy lag `p`.
    #[arg(long)]
    pub lag: Option<usize>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub overlap: Option<f64>,
    #[arg(long, value_parser = parse_taper)]
    pub taper: Option<Taper>,
    /// Estimate on the raw scale instead of the unit-bit-normalized copy.
    #[arg(long)]
    pub no_normalize: bool,

    /// Subset size for order-q diversification.
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub partitions: Option<usize>,
    /// Moment order of the tail ratio.
    #[arg(long)]
    pub moment_order: Option<u32>,
    /// Per-period risk-free rate of the replication cash leg.
    #[arg(long)]
    pub cash_rate: Option<f64>,

    #[command(flatten)]
    pub prior: PriorArgs,
    #[arg(long)]
    pub p_value: Option<f64>,
    /// Effective number of trials for the multi-trial test.
    #[arg(long)]
    pub m_eff: Option<f64>,
    /// Monthly cost rate `r_c`.
    #[arg(long)]
    pub cost_rate: Option<f64>,
    /// Monthly risk-free rate `r_f`.
    #[arg(long)]
    pub risk_free: Option<f64>,

    /// Report path; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub summary_csv: Option<PathBuf>,
}

impl AnalyzeArgs {
    /// Defaults, then the config file, then flags.
    pub fn to_config(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        fn set<T: Clone>(slot: &mut T, v: &Option<T>) {
            if let Some(v) = v {
                *slot = v.clone();
            }
        }
        if self.input.is_some() {
            c.input = self.input.clone();
        }
        if !self.candidates.is_empty() {
            c.candidates = self.candidates.clone();
        }
        set(&mut c.analyses, &self.analyses);
        set(&mut c.period, &self.period);
        c.drop_invalid_rows |= self.drop_invalid_rows;
        set(&mut c.seed, &self.seed);

        let e = &mut c.estimator;
        set(&mut e.method, &self.method);
        if self.precision.is_some() {
            e.precision = self.precision;
        }
        set(&mut e.resamples, &self.resamples);
        if self.lag.is_some() {
            e.lag = self.lag;
        }
        if self.window.is_some() {
            e.window = self.window;
        }
        set(&mut e.overlap, &self.overlap);
        set(&mut e.taper, &self.taper);
        if self.no_normalize {
            e.normalize = false;
        }

        set(&mut c.order_q.q, &self.q);
        set(&mut c.order_q.partitions, &self.partitions);
        set(&mut c.tails.order, &self.moment_order);
        set(&mut c.tails.risk_free, &self.cash_rate);

        let p = &mut c.passive;
        set(&mut p.prior.mu0, &self.prior.mu0);
        set(&mut p.prior.nu0, &self.prior.nu0);
        set(&mut p.prior.alpha0, &self.prior.alpha0);
        set(&mut p.prior.beta0, &self.prior.beta0);
        set(&mut p.p_value, &self.p_value);
        if self.m_eff.is_some() {
            p.m_eff = self.m_eff;
        }
        set(&mut p.cost_rate, &self.cost_rate);
        set(&mut p.risk_free, &self.risk_free);

        if self.output.is_some() {
            c.output = self.output.clone();
        }
        if self.summary_csv.is_some() {
            c.summary_csv = self.summary_csv.clone();
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(subcommand)]
    pub generator: Generator,
    /// CSV path; stdout when omitted.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Omit the weekday date column.
    #[arg(long, global = true)]
    pub undated: bool,
}

/// Shared factor-panel parameters.
#[derive(Debug, Clone, Args)]
pub struct FactorArgs {
    #[arg(long, default_value_t = 50)]
    pub assets: usize,
    #[arg(long, default_value_t = 25)]
    pub factors: usize,
    #[arg(long = "T", default_value_t = 2000)]
    pub len: usize,
    /// Target determinant of the innovation covariance.
    #[arg(long, default_value_t = 1.0)]
    pub det_target: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Generator {
    /// AR(1) with unit-variance Student-t innovations.
    StudentTAr1 {
        #[arg(long, allow_negative_numbers = true)]
        phi: f64,
        #[arg(long)]
        nu: f64,
        #[arg(long = "T")]
        len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Independent Gaussian AR(1) columns.
    GaussianAr1 {
        #[arg(long, allow_negative_numbers = true)]
        phi: f64,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long = "T")]
        len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// I.i.d. Gaussian noise.
    GaussianWhite {
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long = "T")]
        len: usize,
        #[arg(long, default_value_t = 1.0)]
        sd: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Memoryless Gaussian pair with correlation rho.
    CorrelatedPair {
        #[arg(long, allow_negative_numbers = true)]
        rho: f64,
        #[arg(long = "T")]
        len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Low-rank factor panel with AR(1) coupling.
    FactorPanel(FactorArgs),
    /// Returns of Dirichlet-weighted managers on a factor panel.
    DirichletManagers {
        #[command(flatten)]
        factor: FactorArgs,
        /// Concentrations, one per manager.
        #[arg(long, value_delimiter = ',')]
        alphas: Vec<f64>,
        /// Number of managers on the grid 0.001 + 0.005 (i − 1) when no
        /// concentrations are given.
        #[arg(long, default_value_t = 40)]
        managers: usize,
    },
    /// A factor panel plus a trailing-return momentum column.
    MomentumOverlay {
        #[command(flatten)]
        factor: FactorArgs,
        #[arg(long, default_value_t = 20)]
        window: usize,
    },
}

#[derive(Debug, Args)]
pub struct SpiTestArgs {
    /// Panel whose columns give the reference Sharpe ratios.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Reference monthly Sharpe ratios.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub reference_bsrs: Vec<f64>,
    /// Panel whose columns are the candidates.
    #[arg(long)]
    pub candidates: Option<PathBuf>,
    /// Candidate monthly Sharpe ratios.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub bsr: Vec<f64>,
    #[arg(long, value_parser = parse_period, default_value = "daily")]
    pub period: Period,
    #[command(flatten)]
    pub prior: PriorArgs,
    #[arg(long, default_value_t = 0.05)]
    pub p_value: f64,
    #[arg(long)]
    pub m_eff: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub cost_rate: f64,
    #[arg(long, default_value_t = 0.0)]
    pub risk_free: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FiguresArgs {
    /// frontier, convergence, spi-posterior or id-sf12.
    #[arg(required = true)]
    pub names: Vec<String>,
    /// Directory receiving `<name>.csv`; stdout when omitted and a single
    /// figure is requested.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Panel for id-sf12; a generated factor panel when omitted.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Reference monthly Sharpe ratios for spi-posterior.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub reference_bsrs: Vec<f64>,
    #[command(flatten)]
    pub prior: PriorArgs,
}
