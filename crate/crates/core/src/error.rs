use thiserror::Error;

/// Errors raised anywhere in the geometry pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("point {point:?} lies outside the domain of {what}")]
    OutOfDomain { what: String, point: Vec<f64> },

    #[error("non-finite value while evaluating {what} at {point:?}")]
    NonFinite { what: String, point: Vec<f64> },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("degenerate metric at {point:?}: {detail}")]
    Degenerate { point: Vec<f64>, detail: String },

    #[error("singular matrix")]
    SingularMatrix,

    #[error("matrix is not skew-symmetric (defect {defect:e})")]
    NotSkew { defect: f64 },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integration diverged at step {step}")]
    Integration { step: usize },
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;
