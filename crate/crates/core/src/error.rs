use thiserror::Error;

/// Errors raised by model validation and the numerical pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("size limit exceeded: {what} = {value} (max {max})")]
    TooLarge {
        what: &'static str,
        value: usize,
        max: usize,
    },

    #[error("index {index} out of range (< {bound})")]
    OutOfRange { index: usize, bound: usize },

    #[error("instance parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
