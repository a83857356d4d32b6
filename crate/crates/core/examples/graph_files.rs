// Writing and reading the line-oriented graph file format.
//
// Run with `cargo run --example graph_files`.

use lazysp::{Directedness, Graph, ProblemInstance, Query, INF};

pub fn run() -> lazysp::Result<()> {
    let graph = Graph::new(4, Directedness::Directed, [(0, 1), (1, 3), (0, 2), (2, 3)])?;
    let instance = ProblemInstance::new(
        graph,
        Some(Query { start: 0, goal: 3 }),
        vec![1.0, 1.0, 1.25, 1.25],
        vec![1.0, INF, 1.5, 1.25],
    )?;
    let text = instance.to_text();
    print!("{text}");
    let parsed = ProblemInstance::parse(&text)?;
    assert_eq!(parsed, instance);
    println!("round trip ok");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
