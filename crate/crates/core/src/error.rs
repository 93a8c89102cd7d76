use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("capacity exceeded: {what} needs {required}, cap is {cap}")]
    Capacity {
        what: String,
        required: usize,
        cap: usize,
    },

    #[error("architecture error: {0}")]
    Architecture(String),

    /// A formula was evaluated outside the regime in which it holds.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("missing free parameter `{0}`")]
    MissingParameter(&'static str),

    #[error("solver did not converge: {0}")]
    NoConvergence(String),

    #[error("gateset: {0}")]
    GateSet(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
