//! Lazy shortest-path search for graphs whose edge weights are expensive to
//! evaluate.
//!
//! [`engine::run_lazysp`] repeatedly solves the shortest-path problem under
//! optimistic lazy weights and evaluates only the edges a pluggable
//! [`selectors::EdgeSelector`] picks from each candidate path. The
//! [`baselines`] module provides A* with reopening and Lazy Weighted A* for
//! differential testing, and [`experiments`] reproduces the random-graph
//! and unit-square roadmap benchmarks.

// `!(x > 0.0)` style checks deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod graph;
pub mod search;
pub mod selectors;
pub mod engine;
pub mod problem;
pub mod experiments;
pub mod baselines;
pub mod cli;
pub mod equivalence;

pub use engine::{run_lazysp, verify_suboptimality, EngineOptions, RunTrace};
pub use error::{Error, Result};
pub use graph::{
    path_length, Directedness, EdgeId, Graph, LazyWeightState, Path, Query, VertexId, Weight, WeightOracle, INF,
};
pub use problem::ProblemInstance;
pub use search::{all_shortest_paths, shortest_path, SearchResult};
pub use selectors::{build_selector, EdgeSelector, SelectorKind, SelectorSettings};
