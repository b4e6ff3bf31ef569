//! Exit-code contract: 0 success, 1 configuration or parse problems,
//! 2 I/O failures, 3 validation failures.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Io(_) => 2,
            CliError::Validation(_) => 3,
        }
    }
}

/// Core errors reaching the CLI are bad run configurations (dimensions,
/// ranges, non-unitary inputs), so they map to exit 1.
impl From<qnet_core::Error> for CliError {
    fn from(err: qnet_core::Error) -> Self {
        CliError::Config(err.to_string())
    }
}
