use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulator, denoisers and metrics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("empty payload")]
    EmptyPayload,

    #[error("size mismatch: expected {expected}, got {actual} ({what})")]
    Size {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("transport block of {0} bits exceeds the supported maximum")]
    UnsupportedBlockSize(usize),

    #[error("invalid filter window {0}: must be odd and at least 3")]
    InvalidWindow(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error in {path}: {msg}")]
    Parse { path: PathBuf, msg: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("image codec error on {path}: {source}")]
    Codec {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
}

impl Error {
    pub(crate) fn size(what: &'static str, expected: usize, actual: usize) -> Self {
        Error::Size {
            what,
            expected,
            actual,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
