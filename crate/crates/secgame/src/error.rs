//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cost at position {index} is negative ({value})")]
    NegativeCost { index: usize, value: f64 },
    #[error("cost at position {index} is not finite")]
    NonFiniteCost { index: usize },
    #[error("budget {budget} out of range for {m} targets")]
    BudgetOutOfRange { budget: usize, m: usize },
    #[error("instance has no targets")]
    EmptyInstance,
    #[error("subset cardinality {got} does not match required {expected}")]
    CardinalityMismatch { expected: usize, got: usize },
    #[error("index out of range: {what}")]
    IndexOutOfRange { what: String },
    #[error("invalid subset: {reason}")]
    InvalidSubset { reason: String },
    #[error("no feasible candidate cell; this indicates a solver defect")]
    NoFeasibleCell,
    #[error("marginal vector is not liftable: {reason}")]
    InfeasibleMarginal { reason: String },
    #[error("enumeration size {required} exceeds cap {cap}")]
    ScaleLimit { required: u128, cap: u128 },
    #[error("numerical failure: primal value {primal} and dual value {dual} disagree")]
    NumericalFailure { primal: f64, dual: f64 },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
