use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    /// The right-hand side lies outside the column space of the matrix.
    #[error("linear system is infeasible: syndrome is outside the column space")]
    Infeasible,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("trivial code: construction yields k = 0")]
    TrivialCode,

    #[error("code invariant violated: {0}")]
    Invariant(String),

    #[error("n = {n} exceeds the exhaustive-search limit of {limit}; use the claimed distance instead")]
    TooLargeForExhaustive { n: usize, limit: usize },

    #[error("graph operation rejected: {0}")]
    Graph(String),

    #[error("no split target available")]
    NoSplitTarget,

    #[error("unknown code label `{0}`")]
    UnknownCode(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
