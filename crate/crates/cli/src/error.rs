use std::process::ExitCode;

use bdqw_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or invalid configuration. Exit code 2.
    #[error("config error: {0}")]
    Config(String),

    /// Dense computation requested beyond the oracle cap. Exit code 3.
    #[error("size limit: {0}")]
    SizeLimit(String),

    /// Verification ran but at least one defect exceeded tolerance. Exit code 1.
    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::SizeLimit(_) => 3,
            CliError::VerificationFailed(_) | CliError::Runtime(_) => 1,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code())
    }

    /// Wraps a library error, tagging validation failures with `context`.
    pub fn from_core(context: &str, err: CoreError) -> Self {
        match err {
            CoreError::InvalidArgument(msg) => CliError::Config(format!("{context}: {msg}")),
            e @ CoreError::SizeLimit { .. } => CliError::SizeLimit(e.to_string()),
            e @ CoreError::NumericalFailure(_) => CliError::Runtime(format!("{context}: {e}")),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("I/O error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
