use thiserror::Error;

/// Errors raised while building or solving a problem.
#[derive(Debug, Error)]
pub enum Error {
    /// Caller violated a documented precondition (bad sizes, bad parameters).
    #[error("usage error: {0}")]
    Usage(String),

    /// Invalid experiment configuration; the message names the offending field.
    #[error("invalid config: {0}")]
    Config(String),

    /// A matrix expected to be symmetric positive definite produced a non-positive pivot.
    #[error("matrix is not symmetric positive definite ({context}): non-positive pivot at row {row}")]
    NotSpd { context: String, row: usize },

    /// The tridiagonal QL iteration did not converge.
    #[error("eigensolver did not converge for eigenvalue index {index}")]
    EigenNoConvergence { index: usize },

    /// Any other numerical breakdown.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Replaces the context of an SPD violation, leaving other errors untouched.
    pub fn with_context(self, context: impl Into<String>) -> Self {
        match self {
            Error::NotSpd { row, .. } => Error::NotSpd {
                context: context.into(),
                row,
            },
            other => other,
        }
    }

    /// True for errors caused by bad input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Usage(_) | Error::Config(_) | Error::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
