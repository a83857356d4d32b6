//! Runs every selector on every instance of a benchmark class.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc as Shared;

use rayon::prelude::*;
use serde_json::json;

use crate::engine::{run_lazysp, EngineOptions};
use crate::error::{Error, Result};
use crate::graph::{Weight, INF};
use crate::problem::{format_weight, ProblemInstance, ZCache};
use crate::search::shortest_path;
use crate::selectors::{build_selector, EdgeBeliefModel, SelectorKind, SelectorSettings, ValidWeight, ZMatrix};

use super::{derive_seed, gen_partconn, mean_stderr, PartConnConfig, UnitSquare, UnitSquareConfig};

pub const CSV_HEADER: [&str; 8] =
    ["class", "instance", "selector", "edges_evaluated", "length", "optimal", "search_ms", "selector_ms"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BenchClass {
    PartConn,
    UnitSquare,
}

impl BenchClass {
    pub fn name(self) -> &'static str {
        match self {
            BenchClass::PartConn => "partconn",
            BenchClass::UnitSquare => "unitsquare",
        }
    }

    pub fn default_beta(self) -> f64 {
        match self {
            BenchClass::PartConn => 2.0,
            BenchClass::UnitSquare => 21.0,
        }
    }

    pub fn default_instances(self) -> usize {
        match self {
            BenchClass::PartConn => PartConnConfig::default().n_instances,
            BenchClass::UnitSquare => {
                let c = UnitSquareConfig::default();
                c.n_query_pairs * c.n_obstacle_fields
            }
        }
    }

    /// The WeightSamp belief: the true generative model for PartConn, an
    /// independent collision chance with Euclidean weights for UnitSquare.
    pub fn default_belief(self) -> EdgeBeliefModel {
        match self {
            BenchClass::PartConn => EdgeBeliefModel {
                collision_probability: 0.5,
                valid_weight: ValidWeight::Uniform { low: 1.0, high: 2.0 },
            },
            BenchClass::UnitSquare => {
                EdgeBeliefModel { collision_probability: 0.1, valid_weight: ValidWeight::Estimate }
            }
        }
    }
}

impl fmt::Display for BenchClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "partconn" => Ok(BenchClass::PartConn),
            "unitsquare" => Ok(BenchClass::UnitSquare),
            _ => Err(Error::Config(format!("unknown class `{s}` (expected partconn|unitsquare)"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub class: BenchClass,
    pub selectors: Vec<SelectorKind>,
    /// Defaults to the class's full instance count.
    pub instances: Option<usize>,
    pub seed: u64,
    /// Defaults to the class's beta.
    pub beta: Option<f64>,
    pub ws_samples: usize,
    /// Overrides the class's WeightSamp collision probability.
    pub ws_collision_prob: Option<f64>,
    pub engine: EngineOptions,
    /// Worker threads; 0 lets rayon decide.
    pub jobs: usize,
    pub partconn: PartConnConfig,
    pub unitsquare: UnitSquareConfig,
    pub z_cache: Option<PathBuf>,
}

impl BenchConfig {
    pub fn new(class: BenchClass) -> Self {
        BenchConfig {
            class,
            selectors: SelectorKind::ALL.to_vec(),
            instances: None,
            seed: 0,
            beta: None,
            ws_samples: 1000,
            ws_collision_prob: None,
            engine: EngineOptions::default(),
            jobs: 0,
            partconn: PartConnConfig::default(),
            unitsquare: UnitSquareConfig::default(),
            z_cache: None,
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta.unwrap_or(self.class.default_beta())
    }

    pub fn belief(&self) -> Result<EdgeBeliefModel> {
        let base = self.class.default_belief();
        let p = self.ws_collision_prob.unwrap_or(base.collision_probability);
        EdgeBeliefModel::new(p, base.valid_weight)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub class: BenchClass,
    pub instance: usize,
    pub selector: SelectorKind,
    pub edges_evaluated: usize,
    /// True length of the returned path, infinite for no path.
    pub length: Weight,
    /// Matches the optimum on fully revealed weights.
    pub optimal: bool,
    pub search_ms: f64,
    pub selector_ms: f64,
}

/// Instance generator for one benchmark.
enum Instances {
    PartConn { config: PartConnConfig, seed: u64 },
    UnitSquare { roadmap: UnitSquare, z: Option<Shared<ZMatrix>> },
}

impl Instances {
    fn get(&self, id: usize) -> Result<ProblemInstance> {
        match self {
            Instances::PartConn { config, seed } => gen_partconn(config, derive_seed(*seed, id as u64)),
            Instances::UnitSquare { roadmap, .. } => roadmap.instance(id),
        }
    }
}

fn lengths_match(a: Weight, b: Weight) -> bool {
    // Equal-length routes can sum in a different order.
    a == b || (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchRecord>> {
    let n_instances = config.instances.unwrap_or(config.class.default_instances());
    let beta = config.beta();
    let belief = config.belief()?;
    if config.ws_samples == 0 {
        return Err(Error::Config("--ws-samples must be positive".into()));
    }
    let needs_z = config.selectors.contains(&SelectorKind::Partition);
    let cache = config.z_cache.as_ref().map(ZCache::new);
    let instances = match config.class {
        BenchClass::PartConn => Instances::PartConn { config: config.partconn.clone(), seed: config.seed },
        BenchClass::UnitSquare => {
            let roadmap =
                UnitSquare::generate(&config.unitsquare, derive_seed(config.seed, 0), derive_seed(config.seed, 1))?;
            if n_instances > roadmap.num_instances() {
                return Err(Error::Config(format!(
                    "unitsquare has {} instances, {} requested",
                    roadmap.num_instances(),
                    n_instances
                )));
            }
            // One shared roadmap and estimate set: Z is computed once.
            let z = if needs_z {
                let z = match &cache {
                    Some(cache) => cache.load_or_build(&roadmap.graph, &roadmap.estimates, beta)?,
                    None => ZMatrix::build(&roadmap.graph, beta, &roadmap.estimates)?,
                };
                Some(Shared::new(z))
            } else {
                None
            };
            Instances::UnitSquare { roadmap, z }
        }
    };
    let ws_stream = derive_seed(config.seed, u64::MAX);

    let run_instance = |id: usize| -> Result<Vec<BenchRecord>> {
        let instance = instances.get(id)?;
        let query = instance.query.expect("generated instances carry a query");
        let optimum = shortest_path(&instance.graph, query, &instance.true_weights)?.length;
        let precomputed_z = match (&instances, &cache) {
            (Instances::UnitSquare { z, .. }, _) => z.clone(),
            (Instances::PartConn { .. }, Some(cache)) if needs_z => {
                Some(Shared::new(cache.load_or_build(&instance.graph, &instance.estimates, beta)?))
            }
            _ => None,
        };
        let settings = SelectorSettings {
            beta: Some(beta),
            precomputed_z,
            belief,
            ws_samples: config.ws_samples,
            seed: derive_seed(ws_stream, id as u64),
        };
        let mut records = Vec::with_capacity(config.selectors.len());
        for &kind in &config.selectors {
            let mut selector = build_selector(kind, &settings)?;
            let mut oracle = instance.oracle();
            let (result, trace) =
                run_lazysp(&instance.graph, query, &mut oracle, &instance.estimates, selector.as_mut(), config.engine)?;
            debug_assert_eq!(trace.edges_evaluated(), oracle.evaluation_count());
            let length = match &result.path {
                Some(path) => path.length(&instance.true_weights),
                None => INF,
            };
            records.push(BenchRecord {
                class: config.class,
                instance: id,
                selector: kind,
                edges_evaluated: oracle.evaluation_count(),
                length,
                optimal: lengths_match(length, optimum),
                search_ms: trace.search_time.as_secs_f64() * 1e3,
                selector_ms: trace.selector_time.as_secs_f64() * 1e3,
            });
        }
        Ok(records)
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let per_instance: Vec<Vec<BenchRecord>> =
        pool.install(|| (0..n_instances).into_par_iter().map(run_instance).collect::<Result<_>>())?;
    let mut records: Vec<BenchRecord> = per_instance.into_iter().flatten().collect();
    records.sort_by_key(|r| (r.instance, r.selector));
    Ok(records)
}

/// Writes the records as CSV. Timing columns are left empty unless
/// `timings` is set, so that identical seeds give identical files.
pub fn write_csv(records: &[BenchRecord], out: impl Write, timings: bool) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for r in records {
        let (search, select) = if timings {
            (format!("{:.4}", r.search_ms), format!("{:.4}", r.selector_ms))
        } else {
            (String::new(), String::new())
        };
        writer.write_record([
            r.class.name().to_string(),
            r.instance.to_string(),
            r.selector.name().to_string(),
            r.edges_evaluated.to_string(),
            format_weight(r.length),
            r.optimal.to_string(),
            search,
            select,
        ])?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectorSummary {
    pub selector: SelectorKind,
    pub n: usize,
    pub mean: f64,
    pub stderr: f64,
}

/// Mean and standard error of edges evaluated, per selector in canonical
/// selector order.
pub fn summarize(records: &[BenchRecord]) -> Vec<SelectorSummary> {
    SelectorKind::ALL
        .into_iter()
        .filter_map(|kind| {
            let values: Vec<f64> =
                records.iter().filter(|r| r.selector == kind).map(|r| r.edges_evaluated as f64).collect();
            if values.is_empty() {
                return None;
            }
            let (mean, stderr) = mean_stderr(&values);
            Some(SelectorSummary { selector: kind, n: values.len(), mean, stderr })
        })
        .collect()
}

pub fn write_summary_json(class: BenchClass, summaries: &[SelectorSummary], out: impl Write) -> Result<()> {
    let selectors: Vec<_> = summaries
        .iter()
        .map(|s| {
            json!({
                "selector": s.selector.name(),
                "letter": s.selector.letter().to_string(),
                "n": s.n,
                "mean": s.mean,
                "stderr": s.stderr,
            })
        })
        .collect();
    serde_json::to_writer_pretty(out, &json!({ "class": class.name(), "selectors": selectors }))?;
    Ok(())
}
