use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the solver, statistics and run orchestration.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: String, right: String },

    #[error("{key}: {message}")]
    Config { key: String, message: String },

    #[error("degenerate forcing: {0}")]
    DegenerateForcing(String),

    #[error("mode {mode:?} is not divergence-free (|k.a| = {residual:e})")]
    NotDivergenceFree { mode: [i64; 3], residual: f64 },

    #[error("mode {0:?} is outside the admissible band")]
    ModeOutOfBand([i64; 3]),

    #[error("zero wavevector is not allowed (fields have zero mean)")]
    ZeroMode,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("solution blow-up at t = {t}")]
    BlowUp { t: f64, checkpoint: Option<PathBuf> },

    #[error("no averaging window")]
    NoAveragingWindow,

    #[error("invalid criterion input: {0}")]
    Criterion(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
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
