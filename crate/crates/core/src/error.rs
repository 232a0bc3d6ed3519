use thiserror::Error;

use crate::digraph::Vertex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(Vertex),

    #[error("arc ({0}, {1}) is not present")]
    MissingArc(Vertex, Vertex),

    #[error("self-loop ({0}, {0}) is not allowed")]
    SelfLoop(Vertex),

    #[error("vertex sequence {0:?} is not a directed cycle")]
    NotACycle(Vec<Vertex>),

    #[error("{what}: {size} vertices exceeds the supported bound of {max}")]
    Capacity {
        what: &'static str,
        size: usize,
        max: usize,
    },

    #[error("replay failed at step {step}: {source}")]
    Replay {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("malformed decomposition: {0}")]
    Structural(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn capacity(what: &'static str, size: usize, max: usize) -> Self {
        Error::Capacity { what, size, max }
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
