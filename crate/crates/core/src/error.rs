//! Error type shared by all modules of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value violates a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An operation was applied to an object in a state that forbids it,
    /// e.g. subtracting a plane whose multiplicity is already zero.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A regularized per-frequency block failed its Hermitian factorization.
    #[error("singular system at frequency index {freq}")]
    SingularSystem { freq: usize },

    /// The dense reference path refuses problems above its size guard.
    #[error("dense path size guard exceeded: {0}")]
    SizeGuard(String),

    /// A cost-evaluation closure failed during the regularization search.
    #[error("evaluation failed at lambda = {lambda}: {source}")]
    LambdaSearch {
        lambda: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid_arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn invalid_state(msg: impl Into<String>) -> Self {
        Error::InvalidState(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
