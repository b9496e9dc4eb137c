use thiserror::Error;

/// Errors raised by operators, quadrature and the Krylov drivers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum KrylovError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("Ritz value {value:e} is not positive; f is undefined there")]
    NonPositiveRitzValue { value: f64 },

    #[error("quadrature did not converge with {nodes} nodes (last relative change {change:e})")]
    QuadratureNotConverged { nodes: usize, change: f64 },

    #[error("{method} did not reach the tolerance within {iterations} iterations (best estimate {best:e})")]
    NotConverged {
        method: &'static str,
        iterations: usize,
        best: f64,
    },

    #[error("non-positive curvature {curvature:e} detected for shift {shift}")]
    NegativeCurvature { shift: f64, curvature: f64 },

    #[error("inner solve did not converge: residual {residual:e} > {tolerance:e} after {iterations} iterations")]
    InnerSolveFailed {
        iterations: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("basis lost rank at dimension {dimension}")]
    RankLoss { dimension: usize },

    #[error("elliptic function evaluation failed: {0}")]
    Elliptic(String),

    #[error("singular projected matrix")]
    Singular,

    #[error("unknown method tag `{0}`")]
    UnknownMethod(String),

    #[error("io: {0}")]
    Io(String),
}

impl KrylovError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        KrylovError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for KrylovError {
    fn from(e: std::io::Error) -> Self {
        KrylovError::Io(e.to_string())
    }
}

impl From<csv::Error> for KrylovError {
    fn from(e: csv::Error) -> Self {
        KrylovError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for KrylovError {
    fn from(e: serde_json::Error) -> Self {
        KrylovError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, KrylovError>;
