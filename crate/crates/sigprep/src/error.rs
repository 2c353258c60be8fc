//! Crate-wide error type.

use crate::image::Convention;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A requested or implied image dimension is invalid.
    #[error("invalid dimension: {0}")]
    Dimension(String),

    /// An operation received a binary image with the wrong foreground convention.
    #[error("convention mismatch: expected {expected:?}, got {actual:?}")]
    Convention {
        expected: Convention,
        actual: Convention,
    },

    /// Malformed netpbm data. `offset` is the byte position where parsing failed.
    #[error("netpbm format error at byte {offset}: {reason}")]
    Format { offset: usize, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Histogram with no occupied bin.
    #[error("empty histogram: all counts are zero")]
    EmptyHistogram,

    /// Binary image with no foreground pixel (blank scan).
    #[error("no foreground pixel in image")]
    NoForeground,

    /// Crop rectangle extends outside the image.
    #[error("bounding box out of bounds: {0}")]
    OutOfBounds(String),

    /// Invalid operation parameter (angle set, canny thresholds, repeats, ...).
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
