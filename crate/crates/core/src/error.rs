use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("query budget of {budget} evaluations exhausted")]
    BudgetExhausted { budget: usize },

    #[error("objective returned non-finite value {value} at query {eval_index}")]
    NonFiniteValue { value: f64, eval_index: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid search budget: {0}")]
    InvalidBudget(String),

    #[error("k-means degenerated: all points coincide")]
    DegenerateCluster,

    #[error("classifier fit failed: {0}")]
    FitFailure(String),

    #[error("quantity undefined: {0}")]
    Undefined(String),

    #[error("action {action} outside [0, {n_actions})")]
    ActionOutOfRange { action: usize, n_actions: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
