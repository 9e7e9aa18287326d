use thiserror::Error;

/// Errors raised by the planning and training library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("scenario generation failed: {0}")]
    Generation(String),

    #[error("sampling exhausted after {draws} draws without filling the batch")]
    SamplingExhausted { draws: u64 },

    #[error("malformed expression: {0}")]
    Expression(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
