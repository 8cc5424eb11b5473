use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("truncation: {0}")]
    Truncation(String),

    #[error("state norm {0:e} is below the zero-norm threshold")]
    ZeroNorm(f64),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("index {index} out of range for {count} photons")]
    Index { index: usize, count: usize },

    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),

    #[error("minimum at ({re:.4}, {im:.4}) lies on the search-region boundary")]
    Region { re: f64, im: f64 },

    #[error("csv: {0}")]
    Csv(String),
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Csv(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
