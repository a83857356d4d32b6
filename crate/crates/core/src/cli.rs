//! The `lazysp` command line: `run`, `bench`, `equiv` and `gen`.
//!
//! Exit codes: 0 on success, 1 on an algorithmic failure (an equivalence
//! counterexample, a non-optimal benchmark record, a divergent partition
//! function), 2 on a usage error (bad flags, unknown selector, malformed
//! graph file, partition without `--beta`).

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path as FsPath, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{run_lazysp, EngineOptions};
use crate::equivalence::{explore, random_small_instance, Pairing, WeightStyle};
use crate::error::{Error, Result};
use crate::experiments::{
    derive_seed, gen_partconn, run_bench, summarize, write_csv, write_summary_json, BenchClass, BenchConfig,
    PartConnConfig, UnitSquare, UnitSquareConfig,
};
use crate::graph::{Directedness, VertexId, INF};
use crate::problem::{format_weight, ProblemInstance};
use crate::selectors::{build_selector, EdgeBeliefModel, SelectorKind, SelectorSettings, ValidWeight};

#[derive(Debug, Parser)]
#[command(name = "lazysp", version, about = "Lazy shortest-path search with pluggable edge selectors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run LazySP once on a graph file.
    Run(RunArgs),
    /// Run a benchmark class and write per-run records.
    Bench(BenchArgs),
    /// Check edge equivalence of LazySP and a baseline search on random graphs.
    Equiv(EquivArgs),
    /// Write benchmark instances as graph files.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
struct EngineFlags {
    /// Skip the re-search while evaluations come back no heavier than
    /// their lazy value.
    #[arg(long)]
    immediate_expansion: bool,
    /// Keep evaluating when the lazy search finds no finite path.
    #[arg(long)]
    no_early_return: bool,
    /// Fail after this many selector calls.
    #[arg(long)]
    max_iterations: Option<usize>,
}

impl EngineFlags {
    fn options(&self) -> EngineOptions {
        EngineOptions {
            immediate_expansion: self.immediate_expansion,
            infinite_early_return: !self.no_early_return,
            max_iterations: self.max_iterations,
        }
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Graph file (`graph`/`edge` records, optional `# query s g`).
    #[arg(long)]
    graph: PathBuf,
    /// Defaults to the file's query.
    #[arg(long)]
    start: Option<VertexId>,
    #[arg(long)]
    goal: Option<VertexId>,
    /// expand|forward|reverse|alternate|bisection|weightsamp|partition
    #[arg(long)]
    selector: SelectorKind,
    /// Partition inverse temperature (required by partition).
    #[arg(long)]
    beta: Option<f64>,
    /// WeightSamp samples per iteration.
    #[arg(long, default_value_t = 1000)]
    ws_samples: usize,
    /// WeightSamp per-edge collision probability; valid edges keep their estimate.
    #[arg(long, default_value_t = 0.1)]
    ws_collision_prob: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    engine: EngineFlags,
    /// Write the per-iteration JSONL log here (`-` for stdout).
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// partconn|unitsquare
    #[arg(long, default_value = "partconn")]
    class: BenchClass,
    /// Defaults to the full class (1000 or 900).
    #[arg(long)]
    instances: Option<usize>,
    /// Comma-separated selector names; defaults to all seven.
    #[arg(long, value_delimiter = ',')]
    selectors: Vec<SelectorKind>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Defaults to 2 for partconn and 21 for unitsquare.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    ws_samples: usize,
    /// Overrides the class's WeightSamp collision probability.
    #[arg(long)]
    ws_collision_prob: Option<f64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// CSV output; defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary JSON output.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Fill the timing columns (makes output machine-dependent).
    #[arg(long)]
    timings: bool,
    /// Directory caching estimate-only partition matrices.
    #[arg(long)]
    z_cache: Option<PathBuf>,
    #[command(flatten)]
    engine: EngineFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphKinds {
    Directed,
    Undirected,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Weights {
    /// Fine dyadic weights: ties between distinct paths are vanishingly rare.
    Dyadic,
    /// Small integers: many exact ties.
    Integer,
}

#[derive(Debug, Args)]
struct EquivArgs {
    /// expand-astar|forward-lwastar
    #[arg(long)]
    pair: Pairing,
    /// Random graphs per graph kind.
    #[arg(long, default_value_t = 200)]
    graphs: usize,
    #[arg(long, default_value_t = 12)]
    max_vertices: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = GraphKinds::Both)]
    kinds: GraphKinds,
    #[arg(long, value_enum, default_value_t = Weights::Dyadic)]
    weights: Weights,
    /// Cap on baseline states explored per graph.
    #[arg(long, default_value_t = 1_000_000)]
    limit: usize,
    /// Also save the first counterexample here.
    #[arg(long)]
    counterexample: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// partconn|unitsquare
    #[arg(long)]
    class: BenchClass,
    /// Same seed as `bench` gives the same instances.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// First instance id.
    #[arg(long, default_value_t = 0)]
    first: usize,
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Files are named `<class>-<id>.txt`.
    #[arg(long)]
    out_dir: PathBuf,
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Equiv(args) => cmd_equiv(args),
        Command::Gen(args) => cmd_gen(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::Parse { .. }
        | Error::InvalidVertex { .. }
        | Error::InvalidEdge { .. }
        | Error::SelfLoop { .. }
        | Error::WeightCount { .. }
        | Error::InvalidWeight { .. } => 2,
        _ => 1,
    }
}

fn read_instance(path: &FsPath) -> Result<ProblemInstance> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    ProblemInstance::parse(&text)
}

fn create(path: &FsPath) -> Result<io::BufWriter<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::Config(format!("cannot create {}: {e}", path.display())))?;
    Ok(io::BufWriter::new(file))
}

fn cmd_run(args: RunArgs) -> Result<i32> {
    let instance = read_instance(&args.graph)?;
    let query = instance.query_or(args.start, args.goal)?;
    let settings = SelectorSettings {
        beta: args.beta,
        precomputed_z: None,
        belief: EdgeBeliefModel::new(args.ws_collision_prob, ValidWeight::Estimate)?,
        ws_samples: args.ws_samples,
        seed: args.seed,
    };
    let mut selector = build_selector(args.selector, &settings)?;
    let mut oracle = instance.oracle();
    let (result, trace) =
        run_lazysp(&instance.graph, query, &mut oracle, &instance.estimates, selector.as_mut(), args.engine.options())?;

    let stdout = io::stdout();
    let mut out = stdout.lock();
    match &result.path {
        Some(path) => {
            let vertices: Vec<String> = path.vertices().iter().map(|v| v.to_string()).collect();
            writeln!(out, "path: {}", vertices.join(" "))?;
            writeln!(out, "length: {}", format_weight(path.length(&instance.true_weights)))?;
        }
        None => {
            writeln!(out, "path: none")?;
            writeln!(out, "length: {}", format_weight(INF))?;
        }
    }
    writeln!(out, "evaluations: {}", oracle.evaluation_count())?;
    writeln!(out, "iterations: {}", trace.iterations())?;
    writeln!(out, "searches: {}", trace.searches)?;
    match args.trace.as_deref() {
        Some(p) if p == FsPath::new("-") => trace.write_jsonl(&mut out)?,
        Some(p) => {
            let mut file = create(p)?;
            trace.write_jsonl(&mut file)?;
            file.flush()?;
        }
        None => {}
    }
    Ok(0)
}

fn cmd_bench(args: BenchArgs) -> Result<i32> {
    let mut config = BenchConfig::new(args.class);
    if !args.selectors.is_empty() {
        config.selectors = args.selectors;
    }
    config.instances = args.instances;
    config.seed = args.seed;
    config.beta = args.beta;
    config.ws_samples = args.ws_samples;
    config.ws_collision_prob = args.ws_collision_prob;
    config.engine = args.engine.options();
    config.jobs = args.jobs;
    config.z_cache = args.z_cache;

    let records = run_bench(&config)?;
    match &args.out {
        Some(path) => {
            let mut file = create(path)?;
            write_csv(&records, &mut file, args.timings)?;
            file.flush()?;
        }
        None => write_csv(&records, io::stdout().lock(), args.timings)?,
    }
    let summaries = summarize(&records);
    if let Some(path) = &args.summary {
        let mut file = create(path)?;
        write_summary_json(config.class, &summaries, &mut file)?;
        file.flush()?;
    }
    for s in &summaries {
        eprintln!("{} {:<10} n={:<5} mean={:>8.2} stderr={:.2}", s.selector.letter(), s.selector, s.n, s.mean, s.stderr);
    }
    let failures: Vec<_> = records.iter().filter(|r| !r.optimal).collect();
    if !failures.is_empty() {
        for r in &failures {
            eprintln!("non-optimal result: instance {} selector {}", r.instance, r.selector);
        }
        return Ok(1);
    }
    Ok(0)
}

fn cmd_equiv(args: EquivArgs) -> Result<i32> {
    let kinds: &[Directedness] = match args.kinds {
        GraphKinds::Directed => &[Directedness::Directed],
        GraphKinds::Undirected => &[Directedness::Undirected],
        GraphKinds::Both => &[Directedness::Directed, Directedness::Undirected],
    };
    let style = match args.weights {
        Weights::Dyadic => WeightStyle::Dyadic,
        Weights::Integer => WeightStyle::Integer,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut failures = 0;
    for &kind in kinds {
        let (mut states, mut failed_here) = (0, 0);
        for _ in 0..args.graphs {
            let instance = random_small_instance(&mut rng, args.max_vertices, kind, style);
            let query = instance.query.expect("random instances carry a query");
            match explore(&instance, query, args.pair, args.limit)? {
                Ok(stats) => states += stats.baseline_states,
                Err(mismatch) => {
                    if failures == 0 {
                        println!("counterexample ({}, {kind}): {mismatch}", args.pair.name());
                        print!("{}", instance.to_text());
                        if let Some(path) = &args.counterexample {
                            instance.write(path)?;
                        }
                    }
                    failures += 1;
                    failed_here += 1;
                }
            }
        }
        println!(
            "{} {kind}: {} graphs, {states} states compared, {failed_here} failures",
            args.pair.name(),
            args.graphs
        );
    }
    Ok(if failures == 0 { 0 } else { 1 })
}

fn cmd_gen(args: GenArgs) -> Result<i32> {
    fs::create_dir_all(&args.out_dir)?;
    let ids = args.first..args.first + args.count;
    let write = |id: usize, instance: ProblemInstance| -> Result<()> {
        let path = args.out_dir.join(format!("{}-{id:04}.txt", args.class));
        instance.write(&path)?;
        println!("{}", path.display());
        Ok(())
    };
    match args.class {
        BenchClass::PartConn => {
            let config = PartConnConfig::default();
            for id in ids {
                write(id, gen_partconn(&config, derive_seed(args.seed, id as u64))?)?;
            }
        }
        BenchClass::UnitSquare => {
            let roadmap = UnitSquare::generate(
                &UnitSquareConfig::default(),
                derive_seed(args.seed, 0),
                derive_seed(args.seed, 1),
            )?;
            for id in ids {
                write(id, roadmap.instance(id)?)?;
            }
        }
    }
    Ok(0)
}
