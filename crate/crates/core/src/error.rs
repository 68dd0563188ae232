use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("invalid footprint: {0}")]
    InvalidFootprint(String),
    #[error("invalid obstacle: {0}")]
    InvalidObstacle(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid motion primitive: {0}")]
    InvalidPrimitive(String),
    #[error("invalid planner configuration: {0}")]
    InvalidConfig(String),
    #[error("start state invalid: {0}")]
    StartInvalid(String),
    #[error("goal blocked: cell ({0}, {1}) is not free after inflation")]
    GoalBlocked(i32, i32),
    #[error("environment generation failed: {0}")]
    Generation(String),
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
