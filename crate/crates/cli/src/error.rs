use thiserror::Error;

/// Failures of a run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("certificate failure: {0}")]
    Certificate(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Certificate(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<toda_core::TodaError> for CliError {
    fn from(e: toda_core::TodaError) -> Self {
        use toda_core::TodaError as E;
        match e {
            E::InvalidAlgebra { .. }
            | E::GridTooSmall(_)
            | E::PointOutside(..)
            | E::NonPositiveAlpha(_)
            | E::Dimension(_)
            | E::Precondition(_)
            | E::Cache(_) => CliError::Config(e.to_string()),
            E::Io(io) => CliError::Io(io),
            E::BoundViolation { .. } | E::NotSubsolution(_) => CliError::Certificate(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
