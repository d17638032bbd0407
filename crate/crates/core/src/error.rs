use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("signature mismatch: ({}, {}) vs ({}, {})", left.0, left.1, right.0, right.1)]
    SignatureMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("{what} index {index} out of range 1..={bound}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("ambient module mismatch: {0}")]
    AmbientMismatch(String),
    #[error("invariant violated: {check} (residual {residual:.3e})")]
    Invariant { check: String, residual: f64 },
    #[error("precondition failed: {check} (residual {residual:.3e})")]
    Precondition { check: String, residual: f64 },
    #[error("matrix is not self-adjoint (asymmetry {0:.3e})")]
    NotSelfAdjoint(f64),
    #[error("domain rank {rank} is not a multiple of the Clifford unit {unit}")]
    NonIntegerLevel { rank: usize, unit: usize },
    #[error("unknown suite: {0}")]
    UnknownSuite(String),
    #[error("unknown map: {0}")]
    UnknownMap(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
