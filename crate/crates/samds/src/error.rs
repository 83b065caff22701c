//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("net would exceed the cap of {cap} points")]
    NetCapExceeded { cap: usize },

    #[error("simplex exceeded the cap of {cap} pivots")]
    PivotCapExceeded { cap: usize },

    #[error("LP with {vars} variables and {rows} rows exceeds the size cap")]
    LpSizeExceeded { vars: usize, rows: usize },

    #[error("variables {subset:?} are not covered by any family subset")]
    NotCovered { subset: Vec<usize> },

    #[error("conditioning event has zero probability for variable {var}")]
    ZeroProbability { var: usize },

    #[error("enumeration of {assignments} assignments exceeds the cap of {cap}")]
    EnumerationCapExceeded { assignments: u128, cap: u128 },

    #[error("pseudo-distribution invariant violated: {0}")]
    InvariantViolation(String),

    #[error("relaxation LP reported {status}; the uniform distribution is always feasible")]
    SaLpNotOptimal { status: &'static str },

    #[error("random graph stayed disconnected after {tries} attempts")]
    DisconnectedGraph { tries: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
