use std::io;

/// Errors raised by the descriptor-system toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain membership check failed: {0}")]
    Membership(String),

    #[error("linear solve failed: {message} (relative residual {residual:.3e}, condition estimate {condition:.3e})")]
    SolveFailure {
        message: String,
        residual: f64,
        condition: f64,
    },

    #[error("numerical overflow: {0}")]
    Overflow(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Dimension(msg.into()))
}
