use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: NodeId, n: usize },

    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),

    #[error("graph is not connected")]
    Disconnected,

    #[error("graph needs at least {min} nodes, got {n}")]
    TooFewNodes { n: usize, min: usize },

    #[error("decay parameter {0} is outside (0, 1)")]
    InvalidDelta(f64),

    #[error("vector lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid delta grid: {0}")]
    InvalidGrid(String),

    #[error("difference coefficients sum to {0}, expected 0")]
    NonZeroCoefficientSum(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no connected sample after {rejects} rejections (limit {max_rejects})")]
    RejectLimit { rejects: u64, max_rejects: u64 },

    #[error("no trial records to aggregate")]
    EmptyRecords,

    #[error("trial records disagree on {0}")]
    MixedRecords(&'static str),
}
