//! Random partially-connected graphs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Directedness, Graph, Query, INF};
use crate::problem::ProblemInstance;
use crate::search::distances_from;

#[derive(Debug, Clone, PartialEq)]
pub struct PartConnConfig {
    pub n_vertices: usize,
    pub edge_probability: f64,
    pub p_infinite: f64,
    /// Finite true weights are uniform on `[low, high)`.
    pub finite_weight_range: (f64, f64),
    pub estimate: f64,
    pub n_instances: usize,
}

impl Default for PartConnConfig {
    fn default() -> Self {
        PartConnConfig {
            n_vertices: 100,
            edge_probability: 0.05,
            p_infinite: 0.5,
            finite_weight_range: (1.0, 2.0),
            estimate: 1.0,
            n_instances: 1000,
        }
    }
}

/// One undirected instance. Every vertex pair gets an edge independently;
/// start and goal are distinct uniform vertices, redrawn until they are
/// connected in the graph ignoring true weights.
pub fn gen_partconn(config: &PartConnConfig, seed: u64) -> Result<ProblemInstance> {
    let n = config.n_vertices;
    if n < 2 {
        return Err(Error::Config("PartConn needs at least two vertices".into()));
    }
    let (low, high) = config.finite_weight_range;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut endpoints = Vec::new();
    let mut true_weights = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < config.edge_probability {
                endpoints.push((u, v));
                let w = if rng.gen::<f64>() < config.p_infinite { INF } else { rng.gen_range(low..high) };
                true_weights.push(w);
            }
        }
    }
    if endpoints.is_empty() {
        return Err(Error::Config(format!("seed {seed} produced an edgeless graph")));
    }
    let graph = Graph::new(n, Directedness::Undirected, endpoints)?;
    let estimates = vec![config.estimate; graph.num_edges()];
    let structural = vec![1.0; graph.num_edges()];
    // Terminates: some edge exists, so some connected pair exists.
    let query = loop {
        let start = rng.gen_range(0..n);
        let goal = rng.gen_range(0..n);
        if start != goal && distances_from(&graph, start, &structural)[goal] != INF {
            break Query { start, goal };
        }
    };
    ProblemInstance::new(graph, Some(query), estimates, true_weights)
}
