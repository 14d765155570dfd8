use thiserror::Error;

/// Errors raised by library operations. Verification failures that are part
/// of normal operation (Jacobi violations, unmatched classifications) are
/// returned as data, not as errors.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("support mismatch at degree {0}")]
    SupportMismatch(String),

    #[error("ad-nilpotency fails: series did not terminate within {0} steps")]
    NotNilpotent(usize),

    #[error("module window not in class S(W): {0}")]
    Recognition(String),

    #[error("degree function violates the affine law at {0}")]
    AffineLaw(String),

    #[error("gradation is not multiplicity-free: degree {degree} carries {what}")]
    MultiplicityClash { degree: String, what: String },

    #[error("map is not surjective: {0}")]
    NotSurjective(String),

    #[error("window exhausted: {0}")]
    WindowExhausted(String),

    #[error("integrable type mismatch: {0}")]
    TypeMismatch(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
