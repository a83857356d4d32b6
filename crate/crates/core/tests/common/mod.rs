//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use lazysp::graph::Arc;
use lazysp::{Directedness, EdgeId, Graph, ProblemInstance, Query, VertexId, Weight, INF};
use nalgebra::DMatrix;
use rand::Rng;

/// Every simple path from `start` to `goal`, as edge sequences.
pub fn simple_paths(graph: &Graph, start: VertexId, goal: VertexId) -> Vec<Vec<EdgeId>> {
    fn dfs(
        graph: &Graph,
        v: VertexId,
        goal: VertexId,
        on_path: &mut Vec<bool>,
        edges: &mut Vec<EdgeId>,
        out: &mut Vec<Vec<EdgeId>>,
    ) {
        if v == goal {
            out.push(edges.clone());
            return;
        }
        for arc in graph.out_arcs(v) {
            if on_path[arc.to] {
                continue;
            }
            on_path[arc.to] = true;
            edges.push(arc.edge);
            dfs(graph, arc.to, goal, on_path, edges, out);
            edges.pop();
            on_path[arc.to] = false;
        }
    }
    let mut on_path = vec![false; graph.num_vertices()];
    on_path[start] = true;
    let mut out = Vec::new();
    dfs(graph, start, goal, &mut on_path, &mut Vec::new(), &mut out);
    out
}

pub fn length(edges: &[EdgeId], weights: &[Weight]) -> Weight {
    edges.iter().map(|&e| weights[e]).sum()
}

/// Minimum length over all simple paths, infinite when none is finite.
pub fn brute_force_optimum(graph: &Graph, query: Query, weights: &[Weight]) -> Weight {
    simple_paths(graph, query.start, query.goal).iter().map(|p| length(p, weights)).fold(INF, f64::min)
}

/// The set of minimal simple paths (edge sequences) with a finite length.
pub fn brute_force_shortest(graph: &Graph, query: Query, weights: &[Weight]) -> BTreeSet<Vec<EdgeId>> {
    let paths = simple_paths(graph, query.start, query.goal);
    let best = paths.iter().map(|p| length(p, weights)).fold(INF, f64::min);
    if best == INF {
        return BTreeSet::new();
    }
    paths.into_iter().filter(|p| length(p, weights) == best).collect()
}

/// `(I - A)^-1` with `A[x][y]` summing `exp(-beta * w)` over arcs `x -> y`.
pub fn partition_oracle(n: usize, beta: f64, arcs: &[(VertexId, VertexId, Weight)]) -> Option<DMatrix<f64>> {
    let mut m = DMatrix::<f64>::identity(n, n);
    for &(x, y, w) in arcs {
        m[(x, y)] -= (-beta * w).exp();
    }
    m.try_inverse()
}

pub fn spectral_radius(n: usize, beta: f64, arcs: &[(VertexId, VertexId, Weight)]) -> f64 {
    let mut a = DMatrix::<f64>::zeros(n, n);
    for &(x, y, w) in arcs {
        a[(x, y)] += (-beta * w).exp();
    }
    // Gelfand's formula: rho = lim max(A^m)^(1/m), with m = 2^k reached by
    // repeated squaring. `a` holds A^m / exp(log_scale), rescaled to a max
    // entry of 1 each step. Entries stay nonnegative, so nothing cancels.
    let mut log_scale = 0.0;
    let mut m = 1.0;
    for _ in 0..50 {
        let top = a.max();
        if top == 0.0 {
            return 0.0;
        }
        a /= top;
        log_scale += top.ln();
        a = &a * &a;
        log_scale *= 2.0;
        m *= 2.0;
    }
    ((log_scale + a.max().ln()) / m).exp()
}

/// Every arc of `graph` with the weight of its edge.
pub fn weighted_arcs(graph: &Graph, weights: &[Weight]) -> Vec<(VertexId, VertexId, Weight)> {
    graph.arcs().map(|a: Arc| (a.from, a.to, weights[a.edge])).collect()
}

/// A random graph on `n` vertices with independent edges of probability
/// `density` and dyadic weights in [1, 4] fine enough that distinct paths
/// essentially never tie. True weights are infinite with probability
/// `p_inf`; estimates are the finite weight divided by `epsilon`.
pub fn random_instance(
    rng: &mut impl Rng,
    n: usize,
    density: f64,
    directedness: Directedness,
    p_inf: f64,
    epsilon: f64,
) -> ProblemInstance {
    let mut endpoints = Vec::new();
    for u in 0..n {
        for v in 0..n {
            let wanted = match directedness {
                Directedness::Directed => u != v,
                Directedness::Undirected => u < v,
            };
            if wanted && rng.gen::<f64>() < density {
                endpoints.push((u, v));
            }
        }
    }
    let unit = f64::powi(2.0, -30);
    let mut estimates = Vec::new();
    let mut truth = Vec::new();
    for _ in &endpoints {
        let w = rng.gen_range(1u64 << 30..=4 << 30) as f64 * unit;
        estimates.push(w / epsilon);
        truth.push(if rng.gen::<f64>() < p_inf { INF } else { w });
    }
    let start = rng.gen_range(0..n);
    let goal = (start + rng.gen_range(1..n)) % n;
    let graph = Graph::new(n, directedness, endpoints).expect("valid graph");
    ProblemInstance::new(graph, Some(Query { start, goal }), estimates, truth).expect("valid weights")
}

/// What one randomized partition-update trial observed.
#[derive(Debug, Default, Clone, Copy)]
pub struct PartitionTrial {
    pub ops: usize,
    /// Largest entrywise gap to the dense inverse over all ops.
    pub max_error: f64,
    pub divergent_inserts: usize,
    /// Inserts where the divergence error disagreed with the surrogate
    /// `exp(beta * w) <= Z[b][a]` computed from the dense inverse.
    pub surrogate_mismatches: usize,
    /// Inserts where the divergence error disagreed with the spectral
    /// radius of the new arc matrix reaching 1 (boundary cases skipped).
    pub spectral_mismatches: usize,
}

/// Builds a `ZMatrix` for a random graph on `n` vertices, applies `ops`
/// random inserts, removals and reweights, and compares it to a fresh
/// `(I - A)^-1` after every op.
pub fn partition_trial(rng: &mut impl Rng, n: usize, ops: usize) -> PartitionTrial {
    use lazysp::selectors::ZMatrix;

    let random_weight = |rng: &mut dyn rand::RngCore| {
        if rng.gen::<f64>() < 0.1 {
            INF
        } else {
            rng.gen_range(0.05..3.0)
        }
    };
    // A random starting graph, redrawn until its matrix converges.
    let (beta, mut z, mut arcs) = loop {
        let beta = rng.gen_range(0.5..3.0);
        let directedness = if rng.gen() { Directedness::Directed } else { Directedness::Undirected };
        let endpoints: Vec<(VertexId, VertexId)> = (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .filter(|&(u, v)| u != v && (directedness == Directedness::Directed || u < v))
            .filter(|_| rng.gen::<f64>() < 0.25)
            .collect();
        let graph = Graph::new(n, directedness, endpoints).expect("valid graph");
        let weights: Vec<Weight> = (0..graph.num_edges()).map(|_| random_weight(rng)).collect();
        let z = ZMatrix::build(&graph, beta, &weights).expect("valid weights");
        if !z.is_divergent() {
            let arcs: Vec<_> = weighted_arcs(&graph, &weights).into_iter().filter(|a| a.2 != INF).collect();
            break (beta, z, arcs);
        }
    };
    let mut trial = PartitionTrial { ops, ..PartitionTrial::default() };
    for _ in 0..ops {
        let roll = rng.gen::<f64>();
        if arcs.is_empty() || roll < 0.5 {
            let a = rng.gen_range(0..n);
            let b = (a + rng.gen_range(1..n)) % n;
            let w = random_weight(rng);
            let old = partition_oracle(n, beta, &arcs).expect("convergent state");
            let surrogate = w != INF && (beta * w).exp() <= old[(b, a)];
            let mut grown = arcs.clone();
            grown.push((a, b, w));
            let rho = spectral_radius(n, beta, &grown);
            let diverged = z.insert_arc(a, b, w).is_err();
            trial.divergent_inserts += usize::from(diverged);
            trial.surrogate_mismatches += usize::from(diverged != surrogate);
            if (rho - 1.0).abs() > 1e-9 {
                trial.spectral_mismatches += usize::from(diverged != (rho >= 1.0));
            }
            if !diverged {
                arcs = grown;
            }
        } else if roll < 0.75 {
            let (a, b, w) = arcs.swap_remove(rng.gen_range(0..arcs.len()));
            z.remove_arc(a, b, w).unwrap();
        } else {
            let i = rng.gen_range(0..arcs.len());
            let (a, b, old) = arcs[i];
            let new = random_weight(rng);
            if z.reweight_arc(a, b, old, new).is_ok() {
                arcs[i].2 = new;
            }
        }
        let oracle = partition_oracle(n, beta, &arcs).expect("convergent state");
        for x in 0..n {
            for y in 0..n {
                trial.max_error = trial.max_error.max((z.get(x, y) - oracle[(x, y)]).abs());
            }
        }
    }
    trial
}
