use thiserror::Error;

use crate::graph::{EdgeId, VertexId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph with {num_vertices} vertices")]
    InvalidVertex { vertex: VertexId, num_vertices: usize },

    #[error("edge {edge} out of range for a graph with {num_edges} edges")]
    InvalidEdge { edge: EdgeId, num_edges: usize },

    #[error("edge {edge} is a self-loop on vertex {vertex}")]
    SelfLoop { edge: EdgeId, vertex: VertexId },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("expected {expected} weights, got {actual}")]
    WeightCount { expected: usize, actual: usize },

    #[error("negative or NaN weight {weight} on edge {edge}")]
    InvalidWeight { edge: EdgeId, weight: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("selector returned no unevaluated edge of the candidate path at iteration {iteration}")]
    SelectorStalled { iteration: usize },

    #[error("candidate path is already fully evaluated")]
    FullyEvaluated,

    #[error("iteration limit of {0} reached")]
    IterationLimit(usize),

    #[error(
        "partition function diverges when inserting arc {from}->{to} \
         (exp(beta*w) <= Z[to][from]); use a larger beta"
    )]
    Divergent { from: VertexId, to: VertexId },

    #[error("goal is unreachable in the path ensemble (Z[start][goal] = 0)")]
    UnreachableGoal,

    #[error("none of the {samples} weight samples admits a finite path")]
    NoFiniteSamples { samples: usize },

    #[error("search invariant violated: {0}")]
    InvariantViolation(String),

    #[error("search enumeration exceeded {0} states")]
    EnumerationLimit(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
