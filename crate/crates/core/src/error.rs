use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index set of size at least {predicted} exceeds the cap of {cap}")]
    CapExceeded { predicted: u64, cap: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("non-finite input in {0}")]
    NonFinite(&'static str),

    #[error("spectrum of length {have} is too short, need at least {needed}")]
    InsufficientSpectrum { needed: usize, have: usize },

    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
