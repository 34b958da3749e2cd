use thiserror::Error;

use crate::topology::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("fat-tree arity must be even and at least 2, got {0}")]
    InvalidArity(i64),

    #[error("invalid capacity: {0}")]
    InvalidCapacity(String),

    #[error("node {0} is not part of the topology")]
    NodeNotFound(String),

    #[error("feature vector has width {got}, predictor expects {expected}")]
    Shape { expected: usize, got: usize },

    #[error("cannot encode input: {0}")]
    Encoding(String),

    #[error("no path from {src} to {dst}")]
    Unreachable { src: NodeId, dst: NodeId },

    #[error("individual {0} has not been evaluated")]
    Unevaluated(usize),

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
