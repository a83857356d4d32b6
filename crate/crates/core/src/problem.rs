//! Problem instances and the line-oriented graph file format.
//!
//! ```text
//! # query 0 5
//! graph 6 5 undirected
//! edge 0 0 1 1 1.5
//! edge 1 1 2 1 inf
//! ```
//!
//! `#` starts a comment line; a `# query <start> <goal>` comment carries the
//! instance's default query. Weights are decimal numbers or `inf`.

use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::{Path as FsPath, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{Directedness, EdgeId, Graph, Query, VertexId, Weight, WeightOracle, INF};
use crate::selectors::ZMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub graph: Graph,
    /// `None` when the file carried no query.
    pub query: Option<Query>,
    pub estimates: Vec<Weight>,
    pub true_weights: Vec<Weight>,
}

impl ProblemInstance {
    pub fn new(graph: Graph, query: Option<Query>, estimates: Vec<Weight>, true_weights: Vec<Weight>) -> Result<Self> {
        graph.check_weights(&estimates)?;
        graph.check_weights(&true_weights)?;
        if let Some(q) = query {
            Query::new(&graph, q.start, q.goal)?;
        }
        Ok(ProblemInstance { graph, query, estimates, true_weights })
    }

    /// A fresh oracle over the true weights.
    pub fn oracle(&self) -> WeightOracle {
        WeightOracle::from_weights(self.true_weights.clone())
    }

    pub fn query_or(&self, start: Option<VertexId>, goal: Option<VertexId>) -> Result<Query> {
        let start = start.or(self.query.map(|q| q.start));
        let goal = goal.or(self.query.map(|q| q.goal));
        match (start, goal) {
            (Some(s), Some(g)) => Query::new(&self.graph, s, g),
            _ => Err(Error::Config("no start/goal given and the instance carries no query".into())),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(q) = self.query {
            writeln!(out, "# query {} {}", q.start, q.goal).unwrap();
        }
        let g = &self.graph;
        writeln!(out, "graph {} {} {}", g.num_vertices(), g.num_edges(), g.directedness()).unwrap();
        for (id, edge) in g.edges().iter().enumerate() {
            writeln!(
                out,
                "edge {} {} {} {} {}",
                id,
                edge.source,
                edge.target,
                format_weight(self.estimates[id]),
                format_weight(self.true_weights[id])
            )
            .unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse { line, message };
        let mut query = None;
        let mut header: Option<(usize, usize, Directedness)> = None;
        let mut edges: Vec<Option<(VertexId, VertexId, Weight, Weight)>> = Vec::new();
        for (index, raw) in text.lines().enumerate() {
            let line_no = index + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let fields: Vec<&str> = comment.split_whitespace().collect();
                if fields.first() == Some(&"query") {
                    if fields.len() != 3 {
                        return Err(err(line_no, "expected `# query <start> <goal>`".into()));
                    }
                    query = Some(Query { start: parse_int(fields[1], line_no)?, goal: parse_int(fields[2], line_no)? });
                }
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields[0] {
                "graph" => {
                    if header.is_some() {
                        return Err(err(line_no, "duplicate graph header".into()));
                    }
                    if fields.len() != 4 {
                        return Err(err(line_no, "expected `graph <n> <m> <directed|undirected>`".into()));
                    }
                    let directedness = match fields[3] {
                        "directed" => Directedness::Directed,
                        "undirected" => Directedness::Undirected,
                        other => return Err(err(line_no, format!("unknown directedness `{other}`"))),
                    };
                    let m = parse_int(fields[2], line_no)?;
                    header = Some((parse_int(fields[1], line_no)?, m, directedness));
                    edges = vec![None; m];
                }
                "edge" => {
                    if header.is_none() {
                        return Err(err(line_no, "edge before graph header".into()));
                    }
                    if fields.len() != 6 {
                        return Err(err(line_no, "expected `edge <id> <u> <v> <w_est> <w_true>`".into()));
                    }
                    let id = parse_int(fields[1], line_no)?;
                    let record = (
                        parse_int(fields[2], line_no)?,
                        parse_int(fields[3], line_no)?,
                        parse_weight(fields[4], line_no)?,
                        parse_weight(fields[5], line_no)?,
                    );
                    match edges.get_mut(id) {
                        Some(slot @ None) => *slot = Some(record),
                        Some(Some(_)) => return Err(err(line_no, format!("duplicate edge id {id}"))),
                        None => return Err(err(line_no, format!("edge id {id} out of range"))),
                    }
                }
                other => return Err(err(line_no, format!("unknown record `{other}`"))),
            }
        }
        let (n, _, directedness) = header.ok_or_else(|| err(0, "missing graph header".into()))?;
        let mut endpoints = Vec::with_capacity(edges.len());
        let mut estimates = Vec::with_capacity(edges.len());
        let mut true_weights = Vec::with_capacity(edges.len());
        for (id, edge) in edges.into_iter().enumerate() {
            let (u, v, est, w) = edge.ok_or_else(|| err(0, format!("missing edge id {id}")))?;
            endpoints.push((u, v));
            estimates.push(est);
            true_weights.push(w);
        }
        let graph = Graph::new(n, directedness, endpoints)?;
        ProblemInstance::new(graph, query, estimates, true_weights)
    }

    pub fn read(path: impl AsRef<FsPath>) -> Result<Self> {
        ProblemInstance::parse(&fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<FsPath>) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn parse_int(field: &str, line: usize) -> Result<usize> {
    field.parse().map_err(|_| Error::Parse { line, message: format!("expected a non-negative integer, got `{field}`") })
}

fn parse_weight(field: &str, line: usize) -> Result<Weight> {
    if field == "inf" {
        return Ok(INF);
    }
    match field.parse::<f64>() {
        Ok(w) if w >= 0.0 && w.is_finite() => Ok(w),
        _ => Err(Error::Parse { line, message: format!("expected a non-negative weight or `inf`, got `{field}`") }),
    }
}

/// Shortest round-tripping decimal, or `inf`.
pub fn format_weight(w: Weight) -> String {
    if w == INF {
        "inf".to_string()
    } else {
        w.to_string()
    }
}

/// SHA-256 over the graph structure and the estimates, hex encoded.
pub fn graph_fingerprint(graph: &Graph, estimates: &[Weight]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("graph {} {} {}\n", graph.num_vertices(), graph.num_edges(), graph.directedness()));
    for (id, edge) in graph.edges().iter().enumerate() {
        hasher.update(format!("edge {} {} {} {}\n", id, edge.source, edge.target, format_weight(estimates[id])));
    }
    hex::encode(hasher.finalize())
}

/// Directory of precomputed estimate-only partition matrices, one file per
/// `(graph, beta)` pair.
#[derive(Debug, Clone)]
pub struct ZCache {
    dir: PathBuf,
}

impl ZCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ZCache { dir: dir.into() }
    }

    fn file(&self, key: &str, beta: f64) -> PathBuf {
        self.dir.join(format!("{key}-{beta}.z"))
    }

    /// Loads the matrix for `graph` under `estimates`, building and storing
    /// it on a miss.
    pub fn load_or_build(&self, graph: &Graph, estimates: &[Weight], beta: f64) -> Result<ZMatrix> {
        let key = graph_fingerprint(graph, estimates);
        let file = self.file(&key, beta);
        if let Ok(handle) = fs::File::open(&file) {
            if let Some(z) = ZMatrix::read_from(BufReader::new(handle), &key, beta)? {
                return Ok(z);
            }
        }
        let z = ZMatrix::build(graph, beta, estimates)?;
        if !z.is_divergent() {
            fs::create_dir_all(&self.dir)?;
            z.write_to(fs::File::create(&file)?, &key)?;
        }
        Ok(z)
    }
}

/// Edge ids whose true weight is infinite.
pub fn blocked_edges(instance: &ProblemInstance) -> Vec<EdgeId> {
    (0..instance.graph.num_edges()).filter(|&e| instance.true_weights[e] == INF).collect()
}
