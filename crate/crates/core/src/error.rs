use thiserror::Error;

/// Errors produced by graph construction, matrix kernels, samplers and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("graph is not chordal; use the `portchol` method for general graphs")]
    NotChordal,

    #[error("ordering is not a perfect ordering of the graph")]
    NotPerfectOrdering,

    #[error("row {row} is numerically degenerate after orthogonalization (relative residual {residual:e})")]
    DegenerateRow { row: usize, residual: f64 },

    #[error("sampler gave up after {attempts} degenerate draws")]
    SamplerExhausted { attempts: usize },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("diagonal entry {index} is not positive ({value})")]
    NonPositiveDiagonal { index: usize, value: f64 },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("invalid factor: {0}")]
    InvalidFactor(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
