//! Front-end errors and their process exit codes.

use cubic_lab::error::LabError;
use thiserror::Error;

/// Errors surfaced by the command-line front end.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or inconsistent configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// A hard acceptance assertion failed.
    #[error("assertion failed: {0}")]
    Assertion(String),
    /// A cache file was written under a different configuration.
    #[error("{0}")]
    CacheMismatch(LabError),
    /// Any other failure of the numerical layer.
    #[error("{0}")]
    Lab(LabError),
    /// Output could not be written.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        match e {
            LabError::CacheMismatch(_) => CliError::CacheMismatch(e),
            LabError::InvalidInput(msg) => CliError::Config(msg),
            other => CliError::Lab(other),
        }
    }
}

impl CliError {
    /// Process exit code: 2 configuration, 3 assertion, 4 cache mismatch,
    /// 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Assertion(_) => 3,
            CliError::CacheMismatch(_) => 4,
            CliError::Lab(_) | CliError::Io(_) => 1,
        }
    }
}

/// Result alias for the front end.
pub type CliResult<T> = Result<T, CliError>;
