use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the library. Each variant maps onto a CLI exit code.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("structural failure: {0}")]
    Structural(String),

    #[error("{0}")]
    Stage(Box<StageFailure>),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn parse(offset: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: msg.into(),
        }
    }

    /// Process exit code used by the CLI: 2 parameter, 3 structural/stage, 4 resource.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_) | Error::Precondition(_) | Error::Parse { .. } | Error::Io(_) => 2,
            Error::Structural(_) | Error::Stage(_) => 3,
            Error::Resource(_) => 4,
        }
    }
}

/// A pipeline stage that could not complete, with enough context to
/// reproduce or check the failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct StageFailure {
    /// `friendly_vertices`, `absorber`, `p2`, `extend_<r>` or `extendable_<r>`.
    pub stage: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub part: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuple: Option<Vec<usize>>,
    /// Left side of a Hall violator: vertices (first matching) or tuples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hall_set: Option<Vec<Vec<usize>>>,
    /// Its neighborhood in the filtered graph, smaller than `hall_set`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hall_neighborhood: Option<Vec<usize>>,
}

impl StageFailure {
    pub fn new(stage: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            stage: stage.into(),
            message: message.into(),
            ..Default::default()
        }
    }
}

impl std::fmt::Display for StageFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "stage {} failed: {}", self.stage, self.message)
    }
}

impl From<StageFailure> for Error {
    fn from(s: StageFailure) -> Self {
        Error::Stage(Box::new(s))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            offset: e.column(),
            message: e.to_string(),
        }
    }
}
