use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A hard size bound on the input itself (arity, dimensions).
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operation undefined for trivial predicates")]
    TrivialPredicate,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// The requested capturing certificate does not exist (precondition failed).
    #[error("no certificate: {0}")]
    NoCertificate(String),
    /// A resource guard (exhaustive-search ceiling) was exceeded.
    #[error("resource guard exceeded: {0}")]
    GuardExceeded(String),
    /// The modulus candidate set was exhausted without finding a verified
    /// certificate. Indicates the candidate set must be widened.
    #[error("certificate search incomplete: {0}")]
    Incomplete(String),
}

pub type Result<T> = std::result::Result<T, Error>;
