use thiserror::Error;

/// Errors produced by the simulation, analysis and training routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("grid of {k} points per axis aliases a band of {band} (need at least {need})")]
    Aliasing { k: usize, band: usize, need: usize },
    #[error("parameter-shift rule is not valid for ansatz {0}")]
    ParamShiftUnsupported(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("malformed event: {0}")]
    MalformedEvent(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
