use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("instance too large for exhaustive enumeration: {0}")]
    EnumerationLimit(String),

    #[error("LP dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("constant function: the hard-distribution problem is vacuous")]
    ConstantFunction,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("solver did not converge after {iterations} iterations (gap {gap:e})")]
    NoConvergence { iterations: usize, gap: f64 },

    #[error("construction failed: {0}")]
    Construction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
