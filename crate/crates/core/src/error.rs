use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric (asymmetry {violation:.3e})")]
    NotSymmetric { violation: f64 },

    #[error("matrix is not skew-symmetric (violation {violation:.3e})")]
    NotSkew { violation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    /// A singular value landed inside the ambiguity band around the rank threshold.
    #[error("ambiguous rank decision at stage `{stage}`: singular value {sigma:.3e} vs threshold {threshold:.3e}")]
    ToleranceBreakdown {
        stage: String,
        sigma: f64,
        threshold: f64,
    },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("existence conditions not met: {reason}")]
    ConditionsNotMet {
        reason: String,
        witnesses: Vec<Complex64>,
    },

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("closed loop is not regular of index at most one")]
    NotIndexOne,

    #[error("implicit step matrix is numerically singular at t = {t}")]
    SolveFailure { t: f64 },

    #[error("time grid too short ({points} points, need at least 3)")]
    GridTooShort { points: usize },

    #[error("infeasible generator knobs: {0}")]
    InfeasibleKnobs(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
