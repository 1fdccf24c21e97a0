//! Error types shared across the crate.

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("field rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: &'static str, got: &'static str },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("sample count mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("non-finite value in input data")]
    NonFinite,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("blow-up signalled at t = {t}")]
    BlowUp { t: f64 },

    #[error("empty series")]
    EmptySeries,

    #[error("series too short: need at least {need} samples, got {got}")]
    SeriesTooShort { need: usize, got: usize },

    #[error("damping window unresolved for scale {scale}: span {span} (need >= 5*scale), max spacing {max_step} (need <= scale/4)")]
    WindowTooCoarse { span: f64, max_step: f64, scale: f64 },

    #[error("trajectories not aligned at snapshot {index}: t = {a} vs {b}")]
    MisalignedTrajectories { index: usize, a: f64, b: f64 },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("checkpoint error in {path}: {reason}")]
    Checkpoint { path: PathBuf, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
