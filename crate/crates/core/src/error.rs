use thiserror::Error;

/// Errors raised by toolkit operations.
///
/// `Input` covers violated preconditions and malformed data; `Refused` is
/// reserved for requests that are well-formed but exceed a configured search
/// or size budget, or for constructions whose conditions cannot be met.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("refused: {0}")]
    Refused(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn refused<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Refused(msg.into()))
}
