use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates a documented precondition.
    #[error("invalid parameter: {0}")]
    Param(String),

    /// A bound was requested outside the hypothesis under which it is stated.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// Exhaustive enumeration refused because the state space is too large.
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),

    #[error("empty graph: no surviving nodes")]
    EmptyGraph,

    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Param(msg.into())
}
