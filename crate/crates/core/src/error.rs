use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the sampler, optimizer and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} must be a power of two, got {value}")]
    NotPowerOfTwo { what: &'static str, value: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("pair index {pair} out of range: sampler provides {pair_count} dimension pair(s)")]
    PairOutOfRange { pair: usize, pair_count: usize },

    #[error("estimate requires at least one sample")]
    EmptySamples,

    #[error("cannot swap pixel {0} with itself")]
    SamePixel(usize),

    #[error("pixel {0} appears in more than one couple")]
    OverlappingCouples(usize),

    #[error("pixel index {index} out of range for {pixel_count} pixels")]
    PixelOutOfRange { index: usize, pixel_count: usize },

    #[error("gaussian sigma must be positive and finite, got {0}")]
    InvalidSigma(f64),

    #[error("kernel of extent {extent} does not fit a {width}x{height} image")]
    KernelTooLarge {
        extent: usize,
        width: usize,
        height: usize,
    },

    #[error("power spectrum requires a square image, got {width}x{height}")]
    NotSquare { width: usize, height: usize },

    #[error("sampler kind {0} has no tile-dependent estimates and cannot be optimized")]
    NotOptimizable(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed {format} data at byte offset {offset}: {reason}")]
    Format {
        format: &'static str,
        offset: usize,
        reason: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(format: &'static str, offset: usize, reason: impl Into<String>) -> Self {
        Error::Format {
            format,
            offset,
            reason: reason.into(),
        }
    }
}
