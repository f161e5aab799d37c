use thiserror::Error;

/// Errors raised by construction, evaluation and numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument or parameter is outside the accepted domain.
    #[error("rejected input: {0}")]
    InvalidInput(String),

    /// Evaluation hit a pole of the function (e.g. Γ at a nonpositive integer).
    #[error("pole at {0}")]
    Pole(f64),

    /// The requested value lies in a region this implementation does not cover.
    #[error("unsupported region: {0}")]
    Unsupported(String),

    /// A table or scan bound was exceeded.
    #[error("capacity exceeded: requested {requested}, limit {limit}")]
    Capacity { requested: u64, limit: u64 },

    /// A series, quadrature or limit did not reach its tolerance.
    #[error("no convergence: {0}")]
    Convergence(String),

    /// Malformed text input.
    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },

    /// An operation was invoked on an object that does not satisfy its precondition.
    #[error("precondition failed: {0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True when the error reflects numerical non-convergence rather than bad input.
    pub fn is_convergence(&self) -> bool {
        matches!(self, Error::Convergence(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
