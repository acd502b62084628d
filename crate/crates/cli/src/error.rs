use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(#[from] qbat_core::Error),

    #[error("{failed} of {total} sweep points failed")]
    Partial { failed: usize, total: usize },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 1 config or setup error, 2 numerical failure, 3 partial sweep failure.
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) | CliError::Io(_) | CliError::Json(_) => ExitCode::from(1),
            CliError::Numerical(_) => ExitCode::from(2),
            CliError::Partial { .. } => ExitCode::from(3),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}
