use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by loading, configuring and running the upsampling pipeline.
///
/// Every message renders on a single line so the CLI can emit one diagnostic per failure.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse: {path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("format: {path}: byte {offset}: {msg}")]
    Format {
        path: PathBuf,
        offset: usize,
        msg: String,
    },
    #[error("duplicate sample at pixel ({u}, {v})")]
    DuplicatePixel { u: usize, v: usize },
    #[error("pixel ({u}, {v}) outside {width}x{height} grid")]
    OutOfBounds {
        u: i64,
        v: i64,
        width: usize,
        height: usize,
    },
    #[error("non-positive value {value} at pixel ({u}, {v})")]
    NonPositive { u: usize, v: usize, value: f64 },
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("empty seed set")]
    EmptySeeds,
    #[error("pixels {p:?} and {q:?} are not 8-neighbors")]
    NotAdjacent {
        p: (usize, usize),
        q: (usize, usize),
    },
    #[error("grid {width}x{height} exceeds oracle limit {limit}x{limit}")]
    GridTooLarge {
        width: usize,
        height: usize,
        limit: usize,
    },
    #[error("incomplete lattice: missing sample at ({u}, {v})")]
    IncompleteLattice { u: usize, v: usize },
    #[error("empty evaluation domain")]
    EmptyEvaluation,
    #[error("config: {key}: {msg}")]
    Config { key: String, msg: String },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            msg: msg.into(),
        }
    }
}
