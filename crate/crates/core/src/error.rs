use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by grid construction, lifting, solving and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("index window ({start}, {end}) is invalid for a grid with {n_points} points")]
    InvalidWindow {
        start: usize,
        end: usize,
        n_points: usize,
    },

    #[error("shift of {tau} cells exceeds the grid extent ({n_cells} cells)")]
    ShiftOutOfRange { tau: usize, n_cells: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("time 0 is not a grid point")]
    ZeroNotOnGrid,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("area table has no entry for ({0}, {1})")]
    MissingArea(usize, usize),

    #[error("fBm covariance is not numerically positive definite (H = {hurst}, n = {n})")]
    NotPositiveDefinite { hurst: f64, n: usize },

    #[error("non-finite state at step {step}")]
    Divergence { step: usize },

    #[error("{path}:{line}: {message}")]
    ConfigParse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("missing mandatory config keys: {}", .0.join(", "))]
    MissingKeys(Vec<String>),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("I/O error on {path:?}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
