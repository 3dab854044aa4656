//! Error type shared by all library modules.

use thiserror::Error;

/// Errors produced by construction, validation, and I/O paths.
///
/// Numerical routines themselves are total: singular denominators and other
/// degenerate cases fall back to documented defaults instead of erroring.
#[derive(Debug, Error)]
pub enum CoreError {
    /// A vector or matrix had the wrong length for the operation.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// A parameter failed validation (range, ordering, feasibility).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An analysis was requested on data that does not carry what it needs
    /// (for example CTC statistics on a non-classifier trace).
    #[error("unsupported analysis: {0}")]
    UnsupportedAnalysis(String),

    /// Underlying file I/O failed.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A model file could not be parsed as JSON.
    #[error("malformed model file: {0}")]
    ModelFormat(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CoreError>;
