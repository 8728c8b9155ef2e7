use thiserror::Error;

/// Errors surfaced by the simulation and analytics routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("layer error: {0}")]
    Layer(String),

    #[error("normalization error: {0}")]
    Normalization(String),

    #[error("numerical inconsistency: {0}")]
    NumericalInconsistency(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("memory cap exceeded: {0}")]
    ResourceCap(String),

    #[error("aggregation error: {0}")]
    Aggregation(String),

    #[error("estimation error: {0}")]
    Estimation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
