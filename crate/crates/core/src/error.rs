use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Invalid scheme or fit configuration (degree, half-width, δ, ε, arity).
    #[error("invalid configuration: {0}")]
    Config(String),
    /// Input data that does not fit the requested operation.
    #[error("invalid input: {0}")]
    Input(String),
    /// A value outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A combination the library deliberately does not support.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// Normal equations could not be solved.
    #[error("singular normal system: {0}")]
    Singular(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
