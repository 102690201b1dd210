use thiserror::Error;

/// Errors raised by the ART engine.
#[derive(Debug, Error)]
pub enum ArtError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("test part is empty: no positions to weight")]
    EmptyTest,

    #[error("unsupported learner: {0}")]
    UnsupportedLearner(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("data error: {0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl ArtError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        ArtError::InvalidInput(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        ArtError::Config(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, ArtError>;
