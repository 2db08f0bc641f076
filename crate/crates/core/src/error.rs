use thiserror::Error;

/// Failure modes of the focal calculus.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FocalError {
    #[error("{op}: argument outside domain ({detail})")]
    Domain { op: &'static str, detail: String },

    #[error("{op}: no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence {
        op: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("{op}: could not bracket a root in [{lo:e}, {hi:e}]")]
    Bracket { op: &'static str, lo: f64, hi: f64 },

    #[error("invalid probability mass function: {0}")]
    InvalidPmf(String),

    #[error("label sets differ: {0}")]
    LabelMismatch(String),

    #[error("{op}: P is not absolutely continuous with respect to Q")]
    AbsoluteContinuity { op: &'static str },

    #[error("budget of {budget} exhausted in {op}")]
    Budget { op: &'static str, budget: usize },
}

impl FocalError {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        FocalError::Domain {
            op,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, FocalError>;
