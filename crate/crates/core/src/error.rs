use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure category, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Format,
    Invariant,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("frame dimensions differ: {left_width}x{left_height} vs {right_width}x{right_height}")]
    DimensionMismatch {
        left_width: usize,
        left_height: usize,
        right_width: usize,
        right_height: usize,
    },

    #[error("degenerate input: {what} {index} has {reason}")]
    Degenerate {
        what: &'static str,
        index: usize,
        reason: &'static str,
    },

    #[error("non-finite value {value} for {name}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("singular {name}: must be strictly positive, got {value}")]
    Singularity { name: &'static str, value: f64 },

    #[error("sequence has {found} frame(s), at least {required} required")]
    SequenceTooShort { found: usize, required: usize },

    #[error("{maps} flicker map(s) supplied for {pairs} frame pair(s)")]
    MapMismatch { maps: usize, pairs: usize },

    #[error("no frames found matching {0}")]
    NotFound(String),

    #[error("{}: frame index {found} follows {previous}, sequence is not contiguous", path.display())]
    SequenceGap {
        path: PathBuf,
        previous: u64,
        found: u64,
    },

    #[error("{}: duplicate frame index {index}", path.display())]
    DuplicateIndex { path: PathBuf, index: u64 },

    #[error("{}: {width}x{height} frame does not match sequence size {expected_width}x{expected_height}", path.display())]
    SequenceDimension {
        path: PathBuf,
        width: usize,
        height: usize,
        expected_width: usize,
        expected_height: usize,
    },

    #[error("{}: malformed image at byte {offset}: {message}", path.display())]
    Format {
        path: PathBuf,
        offset: u64,
        message: String,
    },

    #[error("{}: unsupported maxval {maxval} at byte {offset} (only 255 is accepted)", path.display())]
    UnsupportedMaxval {
        path: PathBuf,
        offset: u64,
        maxval: u64,
    },

    #[error("{}: unsupported image type: {message}", path.display())]
    UnsupportedImage { path: PathBuf, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{}: {message}", path.display())]
    Config { path: PathBuf, message: String },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Format { .. }
            | Error::UnsupportedMaxval { .. }
            | Error::UnsupportedImage { .. }
            | Error::Json { .. }
            | Error::Config { .. } => ErrorKind::Format,
            Error::Invariant(_) => ErrorKind::Invariant,
            _ => ErrorKind::Input,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
