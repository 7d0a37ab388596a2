use std::path::PathBuf;

/// Errors produced anywhere in the laboratory.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("at least one prime is required")]
    EmptyPrimes,

    #[error("epsilon must lie strictly between 0 and 1, got {0}")]
    EpsilonOutOfRange(f64),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("guard exceeded: {what} is {got}, limit {limit}")]
    GuardExceeded {
        what: &'static str,
        got: u128,
        limit: u128,
    },

    #[error("unsupported: {0}")]
    Capability(String),

    #[error("joint distribution components are not independent")]
    DependentComponents,

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("records passed to a table must all have the same type")]
    MixedRecords,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures caused by an enumeration or search guard.
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::GuardExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
