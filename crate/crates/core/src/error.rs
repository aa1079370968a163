use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its admissible range.
    #[error("invalid parameter `{field}`: {reason}")]
    Parameter { field: &'static str, reason: String },

    /// Graph generation ran out of attempts.
    #[error("graph generation failed: {0}")]
    Generation(String),

    /// The graph has pairs of agents with no path between them.
    #[error("graph is disconnected ({count} unreachable ordered pairs, first {first:?})")]
    Disconnected { count: usize, first: (usize, usize) },

    #[error("config error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    /// An internal invariant would be broken by the requested operation.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Theorem check requested outside the regime the theorem covers.
    #[error("out of theorem scope: {0}")]
    TheoremScope(String),

    #[error("consensus not reached within {horizon} steps")]
    ConsensusNotReached { horizon: usize },

    #[error("sequence too short: need more than {needed} values, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
