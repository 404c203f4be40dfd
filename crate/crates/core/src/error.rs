use thiserror::Error;

/// Errors produced by the synthesis engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("unsupported size: {m} inputs (maximum {max})")]
    UnsupportedSize { m: usize, max: usize },

    #[error("no circuit with delay at most {cap} exists")]
    NoSolution { cap: u32 },

    #[error("time budget exceeded")]
    BudgetExceeded,

    #[error("verification failed: {0}")]
    VerificationFailure(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
