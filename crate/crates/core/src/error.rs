use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation (missing label,
    /// overlapping pins, empty ground set, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested computation exceeds the configured label cap.
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    /// Malformed input data (shape mismatch, non-Hermitian model, bad config).
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
