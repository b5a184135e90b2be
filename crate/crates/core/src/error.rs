use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GkzError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("resource limit exceeded: {what} ({count} > cap {cap})")]
    ResourceLimit {
        what: &'static str,
        count: usize,
        cap: usize,
    },

    #[error("unsupported matrix family: {0}")]
    Unsupported(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl GkzError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        GkzError::InvalidInput(msg.into())
    }
}

pub type Result<T, E = GkzError> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(GkzError::DimensionMismatch { expected, actual })
    }
}
