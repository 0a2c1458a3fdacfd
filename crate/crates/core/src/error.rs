use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the analytics can report.
///
/// [`Error::module`] and [`Error::code`] give a stable, module-qualified
/// identifier (for example `panel-core/MalformedCsv`) that the command line
/// front end prints and maps to exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed CSV: {0}")]
    MalformedCsv(String),
    #[error("panel needs at least 2 rows, got {0}")]
    EmptyPanel(usize),
    #[error("invalid panel: {0}")]
    InvalidPanel(String),
    #[error("degenerate series: {0}")]
    DegenerateSeries(String),
    #[error("lag {lag} is too large for a sample of size {len}")]
    LagTooLarge { lag: usize, len: usize },
    #[error("sequence is empty")]
    EmptySequence,
    #[error("window of {window} samples exceeds the sample size {len}")]
    WindowTooLarge { window: usize, len: usize },
    #[error("spectral density is singular at frequency {omega}")]
    SingularSpectrum { omega: f64 },
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),
    #[error("invalid degrees of freedom {0}")]
    InvalidDof(f64),
    #[error("row misalignment: {left} rows vs {right} rows")]
    RowMisalignment { left: usize, right: usize },
    #[error("invalid subset size q={q} for a pool of {n} assets")]
    InvalidQ { q: usize, n: usize },
    #[error("correlation {0} is outside (-1, 1)")]
    InvalidCorrelation(f64),
    #[error("singular covariance: {0}")]
    SingularCovariance(String),
    #[error("insufficient history: {got} observations, need at least {need}")]
    InsufficientHistory { got: usize, need: usize },
    #[error("empty list of Sharpe ratios")]
    EmptyList,
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("no root: {0}")]
    NoRoot(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Name of the module family that raises this error.
    pub fn module(&self) -> &'static str {
        use Error::*;
        match self {
            MalformedCsv(_) | EmptyPanel(_) | InvalidPanel(_) | LagTooLarge { .. } | Io(_) => "panel-core",
            DegenerateSeries(_) => "panel-core",
            EmptySequence
            | WindowTooLarge { .. }
            | SingularSpectrum { .. }
            | InsufficientSamples(_)
            | InvalidDof(_) => "entropy-engines",
            RowMisalignment { .. } | InvalidQ { .. } | InvalidCorrelation(_) => "diversification",
            SingularCovariance(_) => "tail-impact",
            InsufficientHistory { .. } | EmptyList => "passive-suitability",
            InvalidParam(_) | NoRoot(_) => "synth-lab",
        }
    }

    pub fn code(&self) -> &'static str {
        use Error::*;
        match self {
            MalformedCsv(_) => "MalformedCsv",
            EmptyPanel(_) => "EmptyPanel",
            InvalidPanel(_) => "InvalidPanel",
            DegenerateSeries(_) => "DegenerateSeries",
            LagTooLarge { .. } => "LagTooLarge",
            EmptySequence => "EmptySequence",
            WindowTooLarge { .. } => "WindowTooLarge",
            SingularSpectrum { .. } => "SingularSpectrum",
            InsufficientSamples(_) => "InsufficientSamples",
            InvalidDof(_) => "InvalidDof",
            RowMisalignment { .. } => "RowMisalignment",
            InvalidQ { .. } => "InvalidQ",
            InvalidCorrelation(_) => "InvalidCorrelation",
            SingularCovariance(_) => "SingularCovariance",
            InsufficientHistory { .. } => "InsufficientHistory",
            EmptyList => "EmptyList",
            InvalidParam(_) => "InvalidParam",
            NoRoot(_) => "NoRoot",
            Io(_) => "Io",
        }
    }

    /// `module/code`, e.g. `entropy-engines/WindowTooLarge`.
    pub fn qualified_code(&self) -> String {
        format!("{}/{}", self.module(), self.code())
    }
}
