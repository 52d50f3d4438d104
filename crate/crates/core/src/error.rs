use thiserror::Error;

/// Errors raised by the polytope, symmetry and quantum routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    /// The requested object is too large to materialize under the active cap.
    #[error("{what} count {count} exceeds cap {cap}")]
    CapExceeded { what: &'static str, count: String, cap: u64 },

    /// Facet enumeration refused: vertex count or dimension above the configured limit.
    #[error("{what} = {value} exceeds limit {limit}; use a symmetry-reduced workflow")]
    LimitExceeded { what: &'static str, value: usize, limit: usize },

    #[error("representation mismatch: {0}")]
    RepresentationMismatch(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("product dimension {0} exceeds the see-saw limit")]
    DimensionLimit(usize),

    #[error("non-finite value {0}")]
    NonFinite(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// An internal consistency check failed; this is a bug.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
