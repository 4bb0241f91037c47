//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {0} outside supported range [2, 64]")]
    DimensionOutOfRange(usize),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("squared magnitudes sum to {sum:e}, not 1 within {tol:e}")]
    NotNormalized { sum: f64, tol: f64 },

    #[error("coefficient {index} has magnitude {magnitude:e}; every |c_k| must be positive")]
    VanishingCoefficient { index: usize, magnitude: f64 },

    #[error("non-finite value in input at position {0}")]
    NonFinite(usize),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("j0 = {j0} outside [1, {max}]")]
    J0OutOfRange { j0: usize, max: usize },

    #[error("xi = {xi} outside [0, {xi_max}]")]
    XiOutOfRange { xi: f64, xi_max: f64 },

    #[error("amplitude floor {0} outside (0, 1)")]
    FloorOutOfRange(f64),

    #[error("profile weight at n = {index} is {weight:e}; all weights must be positive")]
    NonpositiveWeight { index: usize, weight: f64 },

    #[error("matrix is not unitary: deviation {deviation:e} exceeds {tol:e}")]
    NotUnitary { deviation: f64, tol: f64 },

    #[error("gamma = {0} outside [0, 1]")]
    GammaOutOfRange(f64),

    #[error("shots_per_input must be at least 1")]
    ZeroShots,

    #[error("counts for input {input} sum to {total}, expected {expected}")]
    InconsistentCounts { input: usize, total: u64, expected: u64 },

    #[error("empty sweep grid")]
    EmptyGrid,

    #[error("no rows left to histogram after excluding xi_prime = 0")]
    EmptyHistogram,

    #[error("histogram needs at least one bin")]
    ZeroBins,

    #[error("sweep point (j0 = {j0}, xi_prime = {xi_prime}): {source}")]
    SweepPoint {
        j0: usize,
        xi_prime: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}
