use thiserror::Error;

/// Errors raised by the quaternion algebra, transforms and solver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("complex adjoint must have even dimensions, got {rows}x{cols}")]
    OddAdjoint { rows: usize, cols: usize },

    #[error("complex adjoint block structure violated (deviation {deviation:e})")]
    AdjointStructure { deviation: f64 },

    #[error("truncation {r} out of range for a {rows}x{cols} matrix")]
    TruncationOutOfRange { r: usize, rows: usize, cols: usize },

    #[error("singular value decomposition failed: {0}")]
    Svd(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("transform axis must be a pure unit quaternion")]
    InvalidAxis,

    #[error("observation mask has no observed entries")]
    EmptyMask,

    #[error("negative threshold {0}")]
    NegativeThreshold(f64),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn dims(rows: usize, cols: usize) -> String {
    format!("{rows}x{cols}")
}
