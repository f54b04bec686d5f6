// SPDX-License-Identifier: MIT OR Apache-2.0

use kernseg_core::Error as CoreError;
use thiserror::Error;

/// Failures reported by the command-line tool, each with an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or malformed input, bad flags, non-finite data.
    #[error("{0}")]
    Input(String),
    /// The requested problem has no solution, e.g. too many segments.
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) => 2,
            Self::Infeasible(_) => 3,
            Self::Io(_) | Self::Internal(_) => 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::Infeasible(_) | CoreError::DegenerateLandmarks => {
                Self::Infeasible(err.to_string())
            }
            CoreError::OutOfBounds(_) => Self::Internal(err.to_string()),
            _ => Self::Input(err.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        Self::Internal(err.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
