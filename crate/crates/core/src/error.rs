use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vector {index} of the subspace is not contained in the ambient space")]
    NotContained { index: usize },

    #[error("position out of range: {0}")]
    Position(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("not a member of T_1: {0}")]
    NotTripodSpan(String),

    #[error("harmonic decomposition fails at g={g}, d={d}: {reason}")]
    StableRange { g: usize, d: usize, reason: String },

    #[error("graph operation requires an ordered graph sum")]
    Unordered,

    #[error("rank-one expression failed: {0}")]
    LoopNormalForm(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("trace definitions disagree: {0}")]
    TraceMismatch(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
