use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point outside the reference domain: {0}")]
    Domain(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("numerical failure: {message} (last residual {residual:e})")]
    Numerical { message: String, residual: f64 },
    #[error("degenerate condenser: {0}")]
    DegenerateCondenser(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("inconsistent invariants: {0}")]
    Inconsistent(String),
    #[error("inadmissible candidate: {0}")]
    Inadmissible(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
