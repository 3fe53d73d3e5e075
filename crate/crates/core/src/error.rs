use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length {0} is not a power of two (>= 2)")]
    InvalidLength(usize),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("epsilon must be positive and finite, got {0}")]
    NonPositiveEpsilon(f64),

    #[error("shot count must be positive")]
    ZeroShots,

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("{what} index {index} out of range 0..{bound}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },

    #[error("invalid polar grid: {0}")]
    InvalidGrid(String),

    #[error("negative radius {0}")]
    NegativeRadius(f64),

    #[error("angle {0} outside [0, 2pi)")]
    AngleOutOfRange(f64),

    #[error("point (r = {0}) lies outside the open disk")]
    OutsideDisk(f64),

    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("image {0}x{1} is too small (need at least {2}x{2})")]
    ImageTooSmall(usize, usize, usize),

    #[error("r_max mismatch: grid has {grid}, raster implies {raster}")]
    RmaxMismatch { grid: f64, raster: f64 },

    #[error("band period {period} is invalid for dimension {dim}")]
    InvalidPeriod { period: usize, dim: usize },

    #[error("invalid noise parameter: {0}")]
    InvalidNoise(String),

    #[error("argument {0} outside supported range")]
    ArgumentOutOfRange(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error("payload length mismatch: expected {expected} bytes, found {found}")]
    PayloadLength { expected: usize, found: usize },

    #[error(transparent)]
    Io(#[from] io::Error),
}
