use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, BenchError>;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{}: {message}", path.display())]
    ConfigFile { path: PathBuf, message: String },
    #[error("bad solver spec `{0}`")]
    Spec(String),
    #[error("invalid suite: {0}")]
    Suite(String),
    #[error("more than one record for {problem} / {solver}")]
    Duplicate { problem: String, solver: String },
    #[error("iteration counts differ across repetitions for {problem} / {solver}")]
    NonDeterministic { problem: String, solver: String },
    #[error(transparent)]
    Core(#[from] lmtr_core::Error),
}

impl BenchError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.into(),
            source,
        }
    }
}
