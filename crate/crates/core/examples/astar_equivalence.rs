// LazySP with the Expand and Forward selectors evaluates the same edges
// as A* with reopening and Lazy Weighted A*.
//
// Run with `cargo run --example astar_equivalence -- [graphs]`.

use lazysp::baselines::{run_astar_reopen, run_lwastar};
use lazysp::equivalence::{explore, random_small_instance, Pairing, WeightStyle};
use lazysp::{build_selector, run_lazysp, Directedness, EngineOptions, SelectorKind, SelectorSettings};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run(graphs: usize) -> lazysp::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);

    // One instance side by side.
    let instance = random_small_instance(&mut rng, 10, Directedness::Undirected, WeightStyle::Dyadic);
    let query = instance.query.expect("random instances carry a query");
    let settings = SelectorSettings::default();
    for (kind, name) in [(SelectorKind::Expand, "A* with reopening"), (SelectorKind::Forward, "Lazy Weighted A*")] {
        let mut selector = build_selector(kind, &settings)?;
        let mut oracle = instance.oracle();
        let (_, trace) =
            run_lazysp(&instance.graph, query, &mut oracle, &instance.estimates, selector.as_mut(), EngineOptions::default())?;
        let mut lazysp_edges = trace.evaluated_edges();
        let mut oracle = instance.oracle();
        let (_, baseline) = match kind {
            SelectorKind::Expand => run_astar_reopen(&instance.graph, query, &mut oracle, &instance.estimates)?,
            _ => run_lwastar(&instance.graph, query, &mut oracle, &instance.estimates)?,
        };
        let mut baseline_edges = baseline.edges;
        lazysp_edges.sort_unstable();
        baseline_edges.sort_unstable();
        println!("LazySP {:<8} {lazysp_edges:?}", kind.name());
        println!("{name:<15} {baseline_edges:?}");
    }

    // Exhaustive comparison of the allowable next steps in every state.
    for pairing in [Pairing::ExpandAStar, Pairing::ForwardLwaStar] {
        let mut failures = 0;
        for _ in 0..graphs {
            let instance = random_small_instance(&mut rng, 10, Directedness::Directed, WeightStyle::Dyadic);
            let query = instance.query.expect("random instances carry a query");
            failures += usize::from(explore(&instance, query, pairing, 100_000)?.is_err());
        }
        println!("{}: {failures} mismatches over {graphs} graphs", pairing.name());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    let graphs = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    if let Err(e) = run(graphs) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
