use thiserror::Error;

/// Errors surfaced by the scoring pipelines and loaders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate covariance: variance {value:e} below floor {floor:e} in dimension {dim}")]
    DegenerateCovariance { dim: usize, value: f64, floor: f64 },

    #[error("residual length {residual} does not match {x_count} x-occurrences in index")]
    ResidualMismatch { x_count: usize, residual: usize },

    #[error("undefined symbol {id} left in index after codebook expansion")]
    UndefinedSymbol { id: u32 },

    #[error("invalid encoding: {0}")]
    InvalidEncoding(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("unsupported format: {0}")]
    Format(String),

    #[error("enumeration limits exceeded: {0}")]
    OracleLimits(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("image error: {0}")]
    Image(String),
}

impl From<image::ImageError> for Error {
    fn from(e: image::ImageError) -> Self {
        Error::Image(e.to_string())
    }
}
