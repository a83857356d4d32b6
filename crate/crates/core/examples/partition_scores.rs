// Partition-function edge scores on a small grid, and how they shift when
// an edge is found blocked.
//
// Run with `cargo run --example partition_scores`.

use lazysp::selectors::{partition_edge_prob, ZMatrix};
use lazysp::{Directedness, Graph, Query, INF};

pub fn run() -> lazysp::Result<()> {
    // 3 x 3 unit grid, corner to corner.
    let idx = |r: usize, c: usize| r * 3 + c;
    let mut endpoints = Vec::new();
    for r in 0..3 {
        for c in 0..3 {
            if c < 2 {
                endpoints.push((idx(r, c), idx(r, c + 1)));
            }
            if r < 2 {
                endpoints.push((idx(r, c), idx(r + 1, c)));
            }
        }
    }
    let graph = Graph::new(9, Directedness::Undirected, endpoints)?;
    let query = Query { start: 0, goal: 8 };
    let beta = 2.0;
    let mut weights = vec![1.0; graph.num_edges()];
    let mut z = ZMatrix::build(&graph, beta, &weights)?;

    let print = |z: &ZMatrix, weights: &[f64]| -> lazysp::Result<()> {
        for e in 0..graph.num_edges() {
            let edge = graph.edge(e);
            let p = partition_edge_prob(z, &graph, query, e, weights)?;
            println!("  edge {e:>2} ({} - {}): {p:.3}", edge.source, edge.target);
        }
        Ok(())
    };
    println!("all edges open, Z[s][g] = {:.5}", z.get(query.start, query.goal));
    print(&z, &weights)?;

    // Block the first edge out of the start and update Z in place.
    z.reweight_edge(&graph, 0, weights[0], INF)?;
    weights[0] = INF;
    println!("edge 0 blocked, Z[s][g] = {:.5}", z.get(query.start, query.goal));
    print(&z, &weights)?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
