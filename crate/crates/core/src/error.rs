use thiserror::Error;

/// Errors raised by the library. Every variant carries enough context to be
/// reported without the caller re-deriving it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero is not allowed here: {0}")]
    Zero(&'static str),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("certificate check failed: {0}")]
    Certificate(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("degenerate form or matrix: {0}")]
    Degenerate(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("oracle inconclusive: {0}")]
    Inconclusive(String),
    #[error("oracle failure: {0}")]
    Oracle(String),
    #[error("retry budget exhausted after {attempts} attempts (seed {seed})")]
    RetryExhausted { seed: u64, attempts: u64 },
    #[error("parse error at {at}: {msg}")]
    Parse { at: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
