// One LazySP run on a hand-built graph, printing the per-iteration trace.
//
// Run with `cargo run --example basic_lazysp`.

use lazysp::{
    build_selector, run_lazysp, Directedness, EngineOptions, Graph, Query, SelectorKind, SelectorSettings, WeightOracle,
    INF,
};

pub fn run() -> lazysp::Result<()> {
    // A short route 0-1-3 whose middle is blocked, and a longer detour
    // 0-2-4-3. Estimates are optimistic unit lengths.
    let graph = Graph::new(5, Directedness::Undirected, [(0, 1), (1, 3), (0, 2), (2, 4), (4, 3)])?;
    let estimates = vec![1.0; graph.num_edges()];
    let truth = vec![1.0, INF, 1.5, 1.5, 1.5];
    let query = Query { start: 0, goal: 3 };

    let mut oracle = WeightOracle::from_weights(truth);
    let mut selector = build_selector(SelectorKind::Forward, &SelectorSettings::default())?;
    let (result, trace) =
        run_lazysp(&graph, query, &mut oracle, &estimates, selector.as_mut(), EngineOptions::default())?;

    for record in &trace.records {
        println!(
            "iteration {}: candidate {:?} (lazy length {}), evaluated {:?}",
            record.iteration, record.candidate, record.candidate_lazy_length, record.outcomes
        );
    }
    let path = result.path.expect("the detour is open");
    println!("path {:?}, length {}", path.vertices(), result.length);
    println!("{} of {} edges evaluated", oracle.evaluation_count(), graph.num_edges());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
