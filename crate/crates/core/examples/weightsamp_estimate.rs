// Monte Carlo estimates of how likely each edge is to lie on the shortest
// path, before and after conditioning on an evaluated edge.
//
// Run with `cargo run --example weightsamp_estimate`.

use lazysp::selectors::{sample_indicator, EdgeBeliefModel, ValidWeight};
use lazysp::{Directedness, Graph, LazyWeightState, Query, INF};

pub fn run() -> lazysp::Result<()> {
    // Two routes from 0 to 3: 0-1-3 (length 2) and 0-2-3 (length 3).
    let graph = Graph::new(4, Directedness::Undirected, [(0, 1), (1, 3), (0, 2), (2, 3)])?;
    let estimates = [1.0, 1.0, 1.5, 1.5];
    let query = Query { start: 0, goal: 3 };
    let model = EdgeBeliefModel::new(0.2, ValidWeight::Estimate)?;

    let mut state = LazyWeightState::new(&estimates);
    let before = sample_indicator(&graph, query, &state, &model, 5000, 7)?;
    // Edge 1 turns out blocked; every later sample pins it to infinity.
    state.record(1, INF);
    let after = sample_indicator(&graph, query, &state, &model, 5000, 7)?;

    println!("edge  p(before)  p(after edge 1 blocked)");
    for e in 0..graph.num_edges() {
        println!("{e:>4}  {:>9.3}  {:>9.3}", before.probability(e), after.probability(e));
    }
    println!(
        "finite-path samples: {} then {} of 5000",
        before.finite_samples(),
        after.finite_samples()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
