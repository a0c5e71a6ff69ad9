use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The fixed-point representation ran out of correct bits, or a
    /// truncated expansion ended before the requested precision.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("expansion has only {available} partial quotients, index {needed} requested")]
    ExpansionTooShort { needed: usize, available: usize },

    #[error("unknown continued fraction rule `{0}`")]
    UnknownRule(String),

    #[error("continued fraction is not eventually periodic")]
    NotPeriodic,

    #[error("point set is empty")]
    EmptyPointSet,

    #[error("instance too large: {0}")]
    TooLarge(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn precision(msg: impl Into<String>) -> Self {
        Error::PrecisionExhausted(msg.into())
    }
}
