use std::path::PathBuf;

use crate::graph::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: negative node id {token}")]
    NegativeId { line: usize, token: String },

    #[error("line {line}: node id {id} is not present in the graph")]
    UnknownNode { line: usize, id: u64 },

    #[error("node {0} is out of range for a graph with {1} nodes")]
    NodeOutOfRange(NodeId, usize),

    #[error("seed set is empty")]
    EmptySeedSet,

    #[error("seed node {0} has degree zero")]
    ZeroDegreeSeed(NodeId),

    #[error("walk reached node {0} with degree zero")]
    ZeroDegreeNode(NodeId),

    #[error("horizon must be at least 1")]
    ZeroHorizon,

    #[error("embedding vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("embedding was computed from a different seed set")]
    SeedMismatch,

    #[error("target community is empty")]
    EmptyTarget,

    #[error("training set is empty")]
    EmptyTraining,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidParameter(message.into())
    }
}
