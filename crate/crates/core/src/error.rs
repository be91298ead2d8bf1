use thiserror::Error;

/// Errors raised by graph construction, filtering and the statistical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("matrix is not square ({rows} x {cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("dense eigendecomposition refused: n = {n} exceeds the cap of {cap} vertices{hint}")]
    CapExceeded { n: usize, cap: usize, hint: &'static str },

    #[error("filter is not finite at node {node} (lambda = {lambda})")]
    NonFiniteFilter { node: usize, lambda: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("too few usable intervals: need {needed}, have {available}")]
    TooFewIntervals { needed: usize, available: usize },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
