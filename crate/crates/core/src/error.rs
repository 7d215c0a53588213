use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("corrupt image: {0}")]
    CorruptImage(String),

    #[error("value {value} at index {index} outside [{min}, {max}]")]
    Range {
        index: usize,
        value: f32,
        min: f32,
        max: f32,
    },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("invalid dimensions {width}x{height}")]
    InvalidDimensions { width: usize, height: usize },

    #[error("buffer length {actual} does not match expected {expected}")]
    BufferLength { expected: usize, actual: usize },

    #[error("dimension mismatch: {left_width}x{left_height} vs {right_width}x{right_height}")]
    DimensionMismatch {
        left_width: usize,
        left_height: usize,
        right_width: usize,
        right_height: usize,
    },

    #[error("channel {0} does not belong to this color space")]
    ChannelMismatch(crate::color::Channel),

    #[error("invalid kernel size {0}: must be odd and at least 1")]
    InvalidKernelSize(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate histogram: all mass lies in a single bin")]
    DegenerateHistogram,

    #[error("bad GMAP magic {0:?}")]
    BadMagic([u8; 4]),

    #[error("unsupported GMAP version {0}")]
    BadVersion(u16),

    #[error("truncated file: expected {expected} bytes, found {actual}")]
    TruncatedFile { expected: u64, actual: u64 },

    #[error("pixel ({x}, {y}) is not covered by any tile")]
    CoverageGap { x: usize, y: usize },

    #[error("could not place blob {blob} without overlap after {attempts} attempts")]
    PlacementFailure { blob: usize, attempts: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn mismatch(left: (usize, usize), right: (usize, usize)) -> Self {
        Error::DimensionMismatch {
            left_width: left.0,
            left_height: left.1,
            right_width: right.0,
            right_height: right.1,
        }
    }
}
