use std::io;

use thiserror::Error;

/// Errors produced by the retrieval pipeline and its I/O surfaces.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("hermite recurrence left the representable range at degree {degree}")]
    HermiteOverflow { degree: usize },

    #[error("reconstruction region is empty")]
    EmptyRegion,

    #[error("no admissible anchor: estimated |f(c)|^2 peaks at {peak:e} (energy {energy:e})")]
    DegenerateAnchor { peak: f64, energy: f64 },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("malformed data: {0}")]
    Malformed(String),

    #[error("{failed} of {total} bound checks failed")]
    BoundViolated { failed: usize, total: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Wav(#[from] hound::Error),
}

impl Error {
    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 4,
            Error::Wav(hound::Error::IoError(_)) => 4,
            Error::EmptyRegion
            | Error::DegenerateAnchor { .. }
            | Error::HermiteOverflow { .. }
            | Error::BoundViolated { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
