use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("unknown figure `{0}`; expected one of frontier, convergence, spi-posterior, id-sf12")]
    UnknownFigure(String),
    #[error(transparent)]
    Core(#[from] usefulness_core::Error),
    #[error("cannot write output: {0}")]
    Output(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl CliError {
    /// `2` for configuration problems, `3` for data and numerical failures.
    pub fn exit_code(&self) -> i32 {
        use usefulness_core::Error as E;
        match self {
            CliError::Config(_) | CliError::UnknownFigure(_) => EXIT_CONFIG,
            CliError::Core(
                E::InvalidParam(_)
                | E::InvalidQ { .. }
                | E::InvalidDof(_)
                | E::InvalidCorrelation(_)
                | E::NoRoot(_)
                | E::LagTooLarge { .. }
                | E::WindowTooLarge { .. }
                | E::EmptyList,
            ) => EXIT_CONFIG,
            CliError::Core(_) | CliError::Output(_) => EXIT_DATA,
        }
    }

    pub fn qualified_code(&self) -> String {
        match self {
            CliError::Config(_) => "cli-reporting/Config".into(),
            CliError::UnknownFigure(_) => "cli-reporting/UnknownFigure".into(),
            CliError::Core(e) => e.qualified_code(),
            CliError::Output(_) => "cli-reporting/Output".into(),
        }
    }
}
