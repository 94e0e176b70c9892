use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("unknown gate name `{0}`")]
    UnknownGate(String),
    #[error("matrix has zero Frobenius norm")]
    ZeroMatrix,
    #[error("invalid GA configuration: {0}")]
    InvalidGaConfig(String),
    #[error("unsupported mixer for this operation: {0}")]
    UnsupportedMixer(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
