//! The incremental partition matrix against a dense matrix inverse.

mod common;

use lazysp::selectors::{partition_edge_prob, ZMatrix};
use lazysp::{Directedness, Graph, Query, INF};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{partition_oracle, partition_trial, weighted_arcs};

#[test]
fn random_update_sequences_match_the_dense_inverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut divergent = 0;
    for _ in 0..20 {
        let n = rng.gen_range(2..=8);
        let t = partition_trial(&mut rng, n, 50);
        assert!(t.max_error <= 1e-9, "{t:?}");
        assert_eq!((t.surrogate_mismatches, t.spectral_mismatches), (0, 0), "{t:?}");
        divergent += t.divergent_inserts;
    }
    assert!(divergent > 0, "no insert exercised divergence");
}

#[test]
fn build_matches_the_dense_inverse_on_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for directed in [true, false] {
        let d = if directed { Directedness::Directed } else { Directedness::Undirected };
        let inst = common::random_instance(&mut rng, 10, 0.3, d, 0.3, 1.0);
        let z = ZMatrix::build(&inst.graph, 2.0, &inst.true_weights).unwrap();
        let oracle = partition_oracle(10, 2.0, &weighted_arcs(&inst.graph, &inst.true_weights)).unwrap();
        for x in 0..10 {
            for y in 0..10 {
                assert!((z.get(x, y) - oracle[(x, y)]).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn edge_probabilities_match_the_dense_inverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for directed in [true, false] {
        let d = if directed { Directedness::Directed } else { Directedness::Undirected };
        let inst = common::random_instance(&mut rng, 9, 0.35, d, 0.0, 1.0);
        let q = inst.query.unwrap();
        let w = &inst.estimates;
        let beta = 2.5;
        let z = ZMatrix::build(&inst.graph, beta, w).unwrap();
        let arcs = weighted_arcs(&inst.graph, w);
        let total = partition_oracle(9, beta, &arcs).unwrap()[(q.start, q.goal)];
        if total == 0.0 {
            continue;
        }
        for e in 0..inst.graph.num_edges() {
            let mut without = w.clone();
            without[e] = INF;
            let rest = partition_oracle(9, beta, &weighted_arcs(&inst.graph, &without)).unwrap()[(q.start, q.goal)];
            let p = partition_edge_prob(&z, &inst.graph, q, e, w).unwrap();
            assert!((p - (1.0 - rest / total)).abs() <= 1e-9, "edge {e}: {p}");
            assert!((0.0..=1.0).contains(&p));
        }
    }
}

#[test]
fn parallel_edges_match_truncated_path_enumeration() {
    // Undirected s = 0, g = 1 with two parallel edges of weight w. A walk
    // from 0 to 1 crosses an odd number of times, each crossing picking
    // one of the two edges.
    let g = Graph::new(2, Directedness::Undirected, [(0, 1), (0, 1)]).unwrap();
    let (beta, w) = (1.3f64, 0.9f64);
    let q = (-beta * w).exp();
    let mut total = 0.0;
    let mut using_first = 0.0;
    let mut k = 1;
    loop {
        let term = (2.0 * q).powi(k);
        if term < 1e-16 {
            break;
        }
        total += term;
        // Walks of k crossings that avoid edge 0 entirely: q^k.
        using_first += term - q.powi(k);
        k += 2;
    }
    let z = ZMatrix::build(&g, beta, &[w, w]).unwrap();
    let query = Query { start: 0, goal: 1 };
    let p0 = partition_edge_prob(&z, &g, query, 0, &[w, w]).unwrap();
    let p1 = partition_edge_prob(&z, &g, query, 1, &[w, w]).unwrap();
    assert!((p0 - p1).abs() <= 1e-12);
    assert!((p0 - using_first / total).abs() <= 1e-10, "{p0} vs {}", using_first / total);
}

#[test]
fn high_beta_argmax_lies_on_the_shortest_path() {
    // Unit grid, 4 x 4, with one diagonal shortcut making the shortest
    // path unique. At large beta the best-scoring edge is on that path.
    let idx = |r: usize, c: usize| r * 4 + c;
    let mut endpoints = Vec::new();
    for r in 0..4 {
        for c in 0..4 {
            if c + 1 < 4 {
                endpoints.push((idx(r, c), idx(r, c + 1)));
            }
            if r + 1 < 4 {
                endpoints.push((idx(r, c), idx(r + 1, c)));
            }
        }
    }
    endpoints.push((idx(0, 0), idx(1, 1)));
    let g = Graph::new(16, Directedness::Undirected, endpoints).unwrap();
    let mut w = vec![1.0; g.num_edges()];
    *w.last_mut().unwrap() = 1.2;
    let query = Query { start: 0, goal: 15 };
    let path = lazysp::shortest_path(&g, query, &w).unwrap().path.unwrap();
    let z = ZMatrix::build(&g, 12.0, &w).unwrap();
    let scores: Vec<f64> =
        (0..g.num_edges()).map(|e| partition_edge_prob(&z, &g, query, e, &w).unwrap()).collect();
    let best = (0..g.num_edges()).max_by(|&a, &b| scores[a].total_cmp(&scores[b])).unwrap();
    assert!(path.edges().contains(&best));
    assert!(scores[best] > 0.99);
}
