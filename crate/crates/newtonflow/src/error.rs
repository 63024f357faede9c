use thiserror::Error;

/// Errors surfaced by evaluators, solvers and the sampling harness.
#[derive(Debug, Error)]
pub enum Error {
    /// An evaluation produced NaN or infinity (e.g. `exp` of a large argument).
    #[error("evaluation produced a non-finite value")]
    NonFinite,

    /// A pivot fell below the singularity threshold during factorization.
    /// Signals that an iterate sits on or near the singular set of the Jacobian.
    #[error("matrix is numerically singular (pivot {pivot:e} <= threshold {threshold:e})")]
    SingularMatrix { pivot: f64, threshold: f64 },

    /// The projection direction has (numerically) zero length. Occurs when the
    /// field at the trial point almost exactly cancels the field at the base
    /// point, a pathological fold.
    #[error("projection direction is numerically zero (norm {norm:e})")]
    ZeroDirection { norm: f64 },

    /// The adaptive step-size control reduced the step below its lower bound
    /// without finding an acceptable step.
    #[error("step size underflow (t = {t:e} < t_lower = {t_lower:e})")]
    StepUnderflow { t: f64, t_lower: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Correct-attractor statistics were requested without oracle labels.
    #[error("correct-attractor statistics require oracle labels")]
    MissingOracle,

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed cache file: {0}")]
    MalformedCache(String),
}

pub type Result<T> = std::result::Result<T, Error>;
