// All seven edge selectors on the same PartConn instance.
//
// Run with `cargo run --example compare_selectors -- [seed]`.

use lazysp::experiments::{gen_partconn, PartConnConfig};
use lazysp::{build_selector, run_lazysp, EngineOptions, SelectorKind, SelectorSettings};

pub fn run(seed: u64) -> lazysp::Result<()> {
    let instance = gen_partconn(&PartConnConfig::default(), seed)?;
    let query = instance.query.expect("generated instances carry a query");
    println!(
        "{} vertices, {} edges, query {} -> {}",
        instance.graph.num_vertices(),
        instance.graph.num_edges(),
        query.start,
        query.goal
    );
    let settings = SelectorSettings { beta: Some(2.0), ws_samples: 200, seed, ..SelectorSettings::default() };
    for kind in SelectorKind::ALL {
        let mut selector = build_selector(kind, &settings)?;
        let mut oracle = instance.oracle();
        let (result, trace) =
            run_lazysp(&instance.graph, query, &mut oracle, &instance.estimates, selector.as_mut(), EngineOptions::default())?;
        println!(
            "{:<10} evaluated {:>3} edges over {:>3} iterations, length {}",
            kind.name(),
            oracle.evaluation_count(),
            trace.iterations(),
            result.length
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    if let Err(e) = run(seed) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
