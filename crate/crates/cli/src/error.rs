use std::path::PathBuf;

use datadepth::DepthError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}:{line}: {msg}", path.display())]
    Parse { path: PathBuf, line: u64, msg: String },

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Depth(#[from] DepthError),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } => 2,
            CliError::Depth(DepthError::DimensionMismatch { .. }) => 3,
            CliError::Depth(DepthError::Format(_)) => 4,
            CliError::Depth(DepthError::NoDirections(_)) => 5,
            CliError::Depth(DepthError::BadScenario(_)) => 6,
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
