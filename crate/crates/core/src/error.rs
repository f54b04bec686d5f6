// SPDX-License-Identifier: MIT OR Apache-2.0

use thiserror::Error;

/// Errors raised by the segmentation toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("index out of bounds: {0}")]
    OutOfBounds(String),

    #[error("infeasible configuration: {0}")]
    Infeasible(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate landmark matrix: every eigenvalue was dropped")]
    DegenerateLandmarks,
}

impl Error {
    pub(crate) fn invalid_input(msg: impl Into<String>) -> Self {
        Self::InvalidInput(msg.into())
    }

    pub(crate) fn out_of_bounds(msg: impl Into<String>) -> Self {
        Self::OutOfBounds(msg.into())
    }

    pub(crate) fn infeasible(msg: impl Into<String>) -> Self {
        Self::Infeasible(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
