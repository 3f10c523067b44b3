use thiserror::Error;

/// Errors produced by the geometry, covering, chaining and profile routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HullError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("boundary is not orientable: {0}")]
    NonOrientable(String),
    #[error("boundary is not closed: {0}")]
    NotClosed(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("scale factor must be positive, got {0}")]
    NonpositiveScale(f64),
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("input too large: {size} exceeds limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, HullError>;
