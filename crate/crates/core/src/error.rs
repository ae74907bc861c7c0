use thiserror::Error;

/// Errors raised by the operator library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid membrane parameters alpha={alpha}, beta={beta}: need alpha, beta >= 0 and alpha + beta > 0")]
    InvalidParams { alpha: f64, beta: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("function does not have opposite boundary values: f(0-)={left}, f(0+)={right}")]
    NotOpposite { left: f64, right: f64 },

    #[error("function is not continuous at the membrane: jump={jump}")]
    NotContinuous { jump: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
