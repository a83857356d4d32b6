// A Halton roadmap on the unit square with one random box obstacle field.
//
// Run with `cargo run --example unitsquare_roadmap -- [instance]`.

use lazysp::experiments::{derive_seed, UnitSquare, UnitSquareConfig};
use lazysp::problem::blocked_edges;
use lazysp::{build_selector, run_lazysp, EngineOptions, SelectorKind, SelectorSettings};

pub fn run(id: usize) -> lazysp::Result<()> {
    let roadmap = UnitSquare::generate(&UnitSquareConfig::default(), derive_seed(0, 0), derive_seed(0, 1))?;
    println!(
        "{} points, {} edges, {} instances",
        roadmap.points.len(),
        roadmap.graph.num_edges(),
        roadmap.num_instances()
    );
    let instance = roadmap.instance(id)?;
    let query = instance.query.expect("roadmap instances carry a query");
    let field = &roadmap.fields[id % roadmap.fields.len()];
    println!(
        "instance {id}: {:?} -> {:?}, {} boxes block {} edges",
        roadmap.points[query.start],
        roadmap.points[query.goal],
        field.len(),
        blocked_edges(&instance).len()
    );
    let settings = SelectorSettings { beta: Some(21.0), ws_samples: 200, ..SelectorSettings::default() };
    for kind in SelectorKind::ALL {
        let mut selector = build_selector(kind, &settings)?;
        let mut oracle = instance.oracle();
        let (result, _) =
            run_lazysp(&instance.graph, query, &mut oracle, &instance.estimates, selector.as_mut(), EngineOptions::default())?;
        println!("{:<10} {:>3} evaluations, length {:.4}", kind.name(), oracle.evaluation_count(), result.length);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    let id = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    if let Err(e) = run(id) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
