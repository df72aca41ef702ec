use thiserror::Error;

use crate::topology::NodeId;

pub type Result<T, E = TeError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum TeError {
    #[error("no path from node {src} to node {dst}")]
    NoPath { src: NodeId, dst: NodeId },

    #[error("failure scenario disconnects demanded pair ({src}, {dst})")]
    Disconnects { src: NodeId, dst: NodeId },

    #[error("edge ({src}, {dst}) does not exist in the topology")]
    UnknownEdge { src: NodeId, dst: NodeId },

    #[error("edge ({src}, {dst}) has zero capacity but carries load")]
    CapacityZeroWithLoad { src: NodeId, dst: NodeId },

    #[error("all gravity node weights are zero")]
    DegenerateWeights,

    #[error("demand of pair ({src}, {dst}) is zero")]
    ZeroDemand { src: NodeId, dst: NodeId },

    #[error("subproblem for pair ({src}, {dst}) is infeasible at its upper bound")]
    NeverFeasible { src: NodeId, dst: NodeId },

    #[error("oracle instance too large: {what} = {got} exceeds cap {cap}")]
    TooLarge { what: &'static str, got: usize, cap: usize },

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("invalid path set: {0}")]
    InvalidPathSet(String),

    #[error("invalid demands: {0}")]
    InvalidDemands(String),

    #[error("invalid split configuration: {0}")]
    InvalidSplit(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("graphml: {0}")]
    GraphMl(String),

    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: Box<TeError>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl TeError {
    /// Attaches the originating file to an error.
    pub fn in_file(self, path: impl Into<String>) -> Self {
        TeError::File {
            path: path.into(),
            source: Box::new(self),
        }
    }

    /// The error with any file context stripped.
    pub fn root(&self) -> &TeError {
        match self {
            TeError::File { source, .. } => source.root(),
            other => other,
        }
    }
}
