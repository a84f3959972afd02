use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource cap exceeded: {requested} qubits requested, at most {cap} supported")]
    ResourceCap { requested: usize, cap: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("value {value} lies outside the calibrated range [{lo}, {hi}]")]
    Extrapolation { value: f64, lo: f64, hi: f64 },

    #[error("rank correlation is undefined: {0}")]
    UndefinedScore(String),
}

pub type Result<T> = std::result::Result<T, Error>;
