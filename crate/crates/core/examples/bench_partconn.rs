// A small PartConn benchmark: CSV records plus the per-selector summary.
//
// Run with `cargo run --release --example bench_partconn -- [instances]`.

use std::io;

use lazysp::experiments::{run_bench, summarize, write_csv, write_summary_json, BenchClass, BenchConfig};

pub fn run(instances: usize, show_csv: bool) -> lazysp::Result<()> {
    let mut config = BenchConfig::new(BenchClass::PartConn);
    config.instances = Some(instances);
    config.ws_samples = 200;
    let records = run_bench(&config)?;
    if show_csv {
        write_csv(&records, io::stdout().lock(), false)?;
    }
    let summaries = summarize(&records);
    for s in &summaries {
        println!("{} {:<10} mean {:>6.2} +/- {:.2}", s.selector.letter(), s.selector.name(), s.mean, s.stderr);
    }
    write_summary_json(config.class, &summaries, io::stdout().lock())?;
    println!();
    Ok(())
}

#[allow(dead_code)]
fn main() {
    let instances = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    if let Err(e) = run(instances, false) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
