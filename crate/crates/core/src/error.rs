use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input contains a non-finite value")]
    NonFinite,

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    /// The simplex method failed to find an optimum. Zero-sum matrix games
    /// always have a value, so this indicates a bug rather than bad input.
    #[error("linear program reported infeasible or unbounded")]
    InfeasibleLp,

    #[error("solver reached gap {eps:e}, above the requested tolerance {tol:e}")]
    ToleranceNotMet { eps: f64, tol: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("history recursion needs more than {budget} nodes")]
    HistoryBudgetExceeded { budget: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn mismatch(what: &'static str, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            what,
            expected,
            found,
        }
    }
}
