//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |A - A^dag| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("trace is {trace:.17} instead of 1")]
    NotUnitTrace { trace: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("hit-and-run chord interval collapsed without an accepted point")]
    ChainStall,

    #[error("measurement outcome {outcome} has vanishing probability {probability:.3e}")]
    DegenerateOutcome { outcome: usize, probability: f64 },

    #[error("protocol map normalization vanished ({value:.3e}); state cannot be processed")]
    DegenerateInput { value: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("angle {index} = {value} outside its bound [{lower}, {upper}]")]
    AngleOutOfBounds {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("need at least {needed} values, got {got}")]
    NotEnoughData { needed: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dump format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
