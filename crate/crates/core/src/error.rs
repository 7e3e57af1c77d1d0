use thiserror::Error;

/// Errors produced by depth computation, detection and the benchmark harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DepthError {
    #[error("scatter matrix is singular or not positive definite ({0})")]
    SingularScatter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("combinatorial budget exceeded: {count} evaluations requested, cap is {cap}")]
    BudgetExceeded { count: u128, cap: u128 },

    #[error("empty data")]
    EmptyData,

    #[error("no anomalies flagged in the label mask")]
    NoAnomalies,

    #[error("optimal direction is ambiguous: the point has zero outlyingness in every sampled direction")]
    AmbiguousDirection,

    #[error("{0} depth does not produce optimal directions")]
    NoDirections(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("model format error: {0}")]
    Format(String),

    #[error("bad scenario: {0}")]
    BadScenario(String),
}

pub type Result<T> = std::result::Result<T, DepthError>;
