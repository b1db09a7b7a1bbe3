use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} too large for exact enumeration: {size} exceeds limit {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("vertex set is not independent in the graph")]
    NotIndependent,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("row {row} of transition matrix sums to {sum}, expected 1")]
    NotStochastic { row: usize, sum: f64 },

    #[error("probability vector sums to {0}, expected 1")]
    NotNormalized(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn too_large(what: &'static str, size: usize, limit: usize) -> Self {
        Error::TooLarge { what, size, limit }
    }
}
