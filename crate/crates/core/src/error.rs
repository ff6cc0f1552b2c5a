use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("labels reference unknown nodes: {}", .0.join(", "))]
    UnknownNodes(Vec<String>),

    #[error("graph has no temporal edges")]
    EmptyGraph,

    #[error("degenerate census; increase m_max or \u{394}t")]
    DegenerateCensus,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("graphlet count overflow")]
    CountOverflow,

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// True for errors caused by bad user input rather than by a failure while running.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Parse { .. }
            | Error::Validation(_)
            | Error::Config(_)
            | Error::UnknownNodes(_)
            | Error::EmptyGraph
            | Error::DimensionMismatch { .. } => true,
            Error::Stage { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}
