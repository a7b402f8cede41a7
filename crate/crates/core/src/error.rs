use thiserror::Error;

/// Errors surfaced by the library. Consistency failures are never downgraded
/// to warnings: an exact identity that fails to hold means either bad input
/// or a bug, and both must stop the computation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("discriminant must be a squarefree product of an odd number of primes, got {0}")]
    InvalidDiscriminant(String),

    #[error("matrix/form is not positive definite")]
    NotPositiveDefinite,

    #[error("search budget exceeded in {context} (limit {limit})")]
    BudgetExceeded { context: &'static str, limit: usize },

    #[error("mass check failed: expected {expected}, class set sums to {got}")]
    MassMismatch { expected: String, got: String },

    #[error("exact consistency check failed: {0}")]
    ConsistencyFailure(String),

    #[error("fixture line {line}: {msg}")]
    Fixture { line: usize, msg: String },

    #[error("fixture coverage missing for levels {0:?}")]
    FixtureCoverage(Vec<u64>),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
