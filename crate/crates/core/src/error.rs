use thiserror::Error;

/// Errors raised by the numeric and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("value {0} is not a probability in [0, 1]")]
    InvalidProbability(f64),

    #[error("{0}")]
    Domain(String),

    #[error("non-unique optimum: the largest mean {0} is shared by several arms")]
    NonUniqueOptimum(f64),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
