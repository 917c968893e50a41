use thiserror::Error;

/// Errors raised by the algebraic layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid cyclotomic order {0}")]
    InvalidOrder(u64),

    /// An input lies outside the domain of an operation (e.g. `|xi| != 1`).
    #[error("domain error: {0}")]
    Domain(String),

    /// A precondition that the caller is expected to establish does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Structural validation of a matrix datum failed.
    #[error("validation failed: {0}")]
    Validation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("backend mismatch: {0}")]
    Backend(String),

    /// Two independent computations of the same invariant disagree.
    #[error("cross-check failed: {0}")]
    CrossCheck(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
