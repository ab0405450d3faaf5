use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("image dimensions must be positive, got {height}x{width}")]
    EmptyDimensions { height: usize, width: usize },

    #[error("plane data has {actual} samples, expected {expected}")]
    DataLength { expected: usize, actual: usize },

    #[error("unsupported channel count {0}, expected 1 or 3")]
    ChannelCount(usize),

    #[error("shape mismatch: expected {expected:?}, got {actual:?}")]
    ShapeMismatch {
        expected: (usize, usize, usize),
        actual: (usize, usize, usize),
    },

    #[error("image is {height}x{width}, at least {min}x{min} required")]
    TooSmall { height: usize, width: usize, min: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("right-hand side violates the Neumann solvability condition (pixel sum {sum:e}, tolerance {tolerance:e})")]
    InfeasibleRhs { sum: f64, tolerance: f64 },

    #[error("decode error: {0}")]
    Decode(String),

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("encode error: {0}")]
    Encode(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
