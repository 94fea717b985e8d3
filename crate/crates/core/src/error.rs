use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid subsystem selection: {0}")]
    InvalidSubsystems(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid measurement: {0}")]
    InvalidPovm(String),

    #[error("matrix is not an isometry (defect {0:e})")]
    NotIsometry(f64),

    #[error("semidefinite program did not converge after {iterations} iterations (gap {gap:e}, infeasibility {infeasibility:e})")]
    SolverFailed {
        iterations: usize,
        gap: f64,
        infeasibility: f64,
    },

    #[error("binary matrix is rank deficient (rank {rank}, expected {expected})")]
    RankDeficient { rank: usize, expected: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("outside supported envelope: {0}")]
    Envelope(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
