use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("insufficient length for order {order}: sequence has {len} observations")]
    InsufficientLength { order: usize, len: usize },

    #[error("no transitions observed")]
    NoTransitions,

    #[error("all transition counts are zero")]
    EmptyCounts,

    #[error("reducible transition matrix: {0}")]
    Reducible(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state {state} out of range for an alphabet of {kappa} symbols")]
    StateOutOfRange { state: usize, kappa: usize },

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),

    #[error("invalid transition matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sequence too short: {0}")]
    TooShort(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for failures caused by the numbers rather than by malformed input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Reducible(_) | Error::Numerical(_))
    }
}
