use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NjpcError {
    #[error("infeasible censoring scheme: {0}")]
    InfeasibleScheme(String),

    #[error("dimension mismatch: expected {expected} observations, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("parameters must be positive and finite (theta1 = {theta1}, theta2 = {theta2})")]
    NonPositiveParams { theta1: f64, theta2: f64 },

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("enumeration oracle limited to k <= {max}, got k = {k}")]
    OracleTooLarge { k: usize, max: usize },

    #[error("conditioning event 1 <= m_k <= k-1 has negligible probability ({prob:e})")]
    DegenerateConditioning { prob: f64 },

    #[error("mixture index r = {r} outside 1..={max}")]
    IndexOutOfRange { r: usize, max: usize },

    #[error("scale parameters must be positive and finite, got {0}")]
    InvalidScale(f64),

    #[error("MLE does not exist: m_k = {m_k} with k = {k} (need 1 <= m_k <= k-1)")]
    MleDoesNotExist { m_k: usize, k: usize },

    #[error("confidence level must lie in {range}, got {level}")]
    InvalidLevel { level: f64, range: &'static str },

    #[error("survival equation has no root below {cap:e} (tail is flat)")]
    FlatTail { cap: f64 },

    #[error(
        "insufficient survivors: need {needed} from population {population}, {available} left"
    )]
    InsufficientSurvivors {
        population: u8,
        needed: usize,
        available: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = NjpcError> = std::result::Result<T, E>;
