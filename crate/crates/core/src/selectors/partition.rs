//! Boltzmann edge-indicator probabilities over the ensemble of all paths.
//!
//! `Z[x][y]` sums `exp(-beta * len(p))` over every (not necessarily simple)
//! path from `x` to `y`. With `A[x][y] = sum over arcs x->y of exp(-beta * w)`
//! this is `(I - A)^-1`, and adding or removing one arc is a rank-one
//! (Sherman-Morrison) update of the whole matrix. Infinite-weight arcs
//! contribute nothing and are simply absent.

use std::io::{BufRead, Write};
use std::sync::Arc as Shared;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, Query, VertexId, Weight, INF};

use super::{argmax_earliest, EdgeSelector, SelectorContext, SelectorKind};

/// Probabilities closer than this are considered tied. Mirror-symmetric
/// edges otherwise differ in the last bits.
const TIE_TOLERANCE: f64 = 1e-12;

/// Removals subtract, so entries far below the matrix scale lose their
/// relative accuracy. An entry is trusted while it exceeds its rounding
/// drift bound by this factor.
const TRUST_FACTOR: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct ZMatrix {
    beta: f64,
    n: usize,
    values: Vec<f64>,
    divergence: Option<(VertexId, VertexId)>,
    /// Removals applied since the matrix was built by insertions only.
    downdates: usize,
}

impl ZMatrix {
    /// The partition function of the edgeless graph.
    pub fn identity(n: usize, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Config(format!("beta must be positive and finite, got {beta}")));
        }
        let mut values = vec![0.0; n * n];
        for x in 0..n {
            values[x * n + x] = 1.0;
        }
        Ok(ZMatrix { beta, n, values, divergence: None, downdates: 0 })
    }

    /// Inserts every arc of `graph` under `weights` one at a time. If an
    /// insertion diverges the matrix is flagged and left at its last finite
    /// state.
    pub fn build(graph: &Graph, beta: f64, weights: &[Weight]) -> Result<Self> {
        graph.check_weights(weights)?;
        let mut z = ZMatrix::identity(graph.num_vertices(), beta)?;
        for arc in graph.arcs() {
            if let Err(Error::Divergent { from, to }) = z.insert_arc(arc.from, arc.to, weights[arc.edge]) {
                z.divergence = Some((from, to));
                break;
            }
        }
        Ok(z)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn get(&self, x: VertexId, y: VertexId) -> f64 {
        self.values[x * self.n + y]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_divergent(&self) -> bool {
        self.divergence.is_some()
    }

    /// Whether `Z[x][y]` still carries about six significant digits.
    /// Insert-only matrices add positive terms and are always trusted;
    /// each removal may add rounding error on the order of the largest
    /// entry.
    pub fn is_reliable(&self, x: VertexId, y: VertexId) -> bool {
        if self.downdates == 0 {
            return true;
        }
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        self.get(x, y) > TRUST_FACTOR * self.downdates as f64 * f64::EPSILON * scale
    }

    fn check_convergent(&self) -> Result<()> {
        match self.divergence {
            Some((from, to)) => Err(Error::Divergent { from, to }),
            None => Ok(()),
        }
    }

    fn boltzmann(&self, weight: Weight) -> f64 {
        if weight == INF {
            0.0
        } else {
            (-self.beta * weight).exp()
        }
    }

    /// `Z += coef * Z[:, a] * Z[b, :]`.
    fn rank_one(&mut self, a: VertexId, b: VertexId, coef: f64) {
        let n = self.n;
        let column: Vec<f64> = (0..n).map(|x| self.values[x * n + a]).collect();
        let row: Vec<f64> = self.values[b * n..(b + 1) * n].to_vec();
        for (x, &zxa) in column.iter().enumerate() {
            let scale = coef * zxa;
            if scale == 0.0 {
                continue;
            }
            for (zxy, &zby) in self.values[x * n..(x + 1) * n].iter_mut().zip(&row) {
                *zxy += scale * zby;
            }
        }
    }

    /// Adds arc `from -> to` with `weight`. Fails without modifying the
    /// matrix when `exp(beta * weight) <= Z[to][from]`.
    pub fn insert_arc(&mut self, from: VertexId, to: VertexId, weight: Weight) -> Result<()> {
        self.check_convergent()?;
        let q = self.boltzmann(weight);
        if q == 0.0 {
            return Ok(());
        }
        let denominator = 1.0 - q * self.get(to, from);
        if !(denominator > 0.0) {
            return Err(Error::Divergent { from, to });
        }
        self.rank_one(from, to, q / denominator);
        Ok(())
    }

    /// Removes arc `from -> to` previously inserted with `weight`.
    pub fn remove_arc(&mut self, from: VertexId, to: VertexId, weight: Weight) -> Result<()> {
        self.check_convergent()?;
        let q = self.boltzmann(weight);
        if q == 0.0 {
            return Ok(());
        }
        let denominator = 1.0 + q * self.get(to, from);
        self.rank_one(from, to, -q / denominator);
        self.downdates += 1;
        Ok(())
    }

    /// Changes the weight of arc `from -> to` from `old` to `new`. On
    /// divergence the old weight is restored and the error returned.
    pub fn reweight_arc(&mut self, from: VertexId, to: VertexId, old: Weight, new: Weight) -> Result<()> {
        if old == new {
            return self.check_convergent();
        }
        self.remove_arc(from, to, old)?;
        if let Err(err) = self.insert_arc(from, to, new) {
            self.insert_arc(from, to, old)?;
            return Err(err);
        }
        Ok(())
    }

    /// Reweights every arc of edge `e`.
    pub fn reweight_edge(&mut self, graph: &Graph, e: EdgeId, old: Weight, new: Weight) -> Result<()> {
        let arcs: Vec<_> = graph.arcs_of(e).collect();
        for (i, arc) in arcs.iter().enumerate() {
            if let Err(err) = self.reweight_arc(arc.from, arc.to, old, new) {
                for done in &arcs[..i] {
                    self.reweight_arc(done.from, done.to, new, old)?;
                }
                return Err(err);
            }
        }
        Ok(())
    }

    /// `Z[x][y]` as it would be with every arc of `e` (currently at
    /// `weight`) removed, without touching the matrix.
    pub fn value_without_edge(&self, graph: &Graph, e: EdgeId, weight: Weight, x: VertexId, y: VertexId) -> f64 {
        let q = self.boltzmann(weight);
        if q == 0.0 {
            return self.get(x, y);
        }
        let edge = graph.edge(e);
        let (u, v) = (edge.source, edge.target);
        // Removing u->v: Z1[i][j] = Z[i][j] - q Z[i][u] Z[v][j] / (1 + q Z[v][u]).
        let c1 = q / (1.0 + q * self.get(v, u));
        let z1 = |i: VertexId, j: VertexId| self.get(i, j) - c1 * self.get(i, u) * self.get(v, j);
        if graph.is_directed() {
            return z1(x, y);
        }
        // Then removing v->u from Z1.
        let c2 = q / (1.0 + q * z1(u, v));
        z1(x, y) - c2 * z1(x, v) * z1(u, y)
    }

    pub fn write_to(&self, mut out: impl Write, key: &str) -> Result<()> {
        self.check_convergent()?;
        writeln!(out, "zmatrix {} {} {}", self.n, self.beta, key)?;
        for row in self.values.chunks(self.n.max(1)) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }

    /// Reads a matrix written by [`write_to`](Self::write_to). Returns
    /// `None` when the stored key or beta do not match.
    pub fn read_from(input: impl BufRead, key: &str, beta: f64) -> Result<Option<Self>> {
        let mut lines = input.lines();
        let header = lines.next().transpose()?.unwrap_or_default();
        let fields: Vec<&str> = header.split_whitespace().collect();
        let parse_err = |line: usize, message: &str| Error::Parse { line, message: message.to_string() };
        if fields.len() != 4 || fields[0] != "zmatrix" {
            return Err(parse_err(1, "expected `zmatrix <n> <beta> <key>` header"));
        }
        let n: usize = fields[1].parse().map_err(|_| parse_err(1, "bad vertex count"))?;
        let stored_beta: f64 = fields[2].parse().map_err(|_| parse_err(1, "bad beta"))?;
        if fields[3] != key || stored_beta != beta {
            return Ok(None);
        }
        let mut z = ZMatrix::identity(n, beta)?;
        for x in 0..n {
            let line = lines.next().transpose()?.ok_or_else(|| parse_err(x + 2, "missing row"))?;
            let row: Vec<f64> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| parse_err(x + 2, "bad value"))?;
            if row.len() != n {
                return Err(parse_err(x + 2, "wrong row length"));
            }
            z.values[x * n..(x + 1) * n].copy_from_slice(&row);
        }
        Ok(Some(z))
    }
}

/// `p(e) = 1 - Z(P \ e) / Z(P)` for paths from `query.start` to `query.goal`,
/// with `weights` the current lazy weights.
pub fn partition_edge_prob(z: &ZMatrix, graph: &Graph, query: Query, e: EdgeId, weights: &[Weight]) -> Result<f64> {
    z.check_convergent()?;
    let total = z.get(query.start, query.goal);
    if !(total > 0.0) {
        return Err(Error::UnreachableGoal);
    }
    let without = z.value_without_edge(graph, e, weights[e], query.start, query.goal);
    Ok((1.0 - without / total).clamp(0.0, 1.0))
}

/// Partition-function selector. Keeps `Z` in sync with the lazy weights.
#[derive(Debug, Clone)]
pub struct PartitionSelector {
    beta: f64,
    precomputed: Option<Shared<ZMatrix>>,
    z: Option<ZMatrix>,
}

impl PartitionSelector {
    pub fn new(beta: f64) -> Result<Self> {
        ZMatrix::identity(0, beta)?;
        Ok(PartitionSelector { beta, precomputed: None, z: None })
    }

    /// Starts every run from `z`, which must be the partition function of
    /// the run's graph under its estimates.
    pub fn with_precomputed(z: Shared<ZMatrix>) -> Result<Self> {
        z.check_convergent()?;
        Ok(PartitionSelector { beta: z.beta(), precomputed: Some(z), z: None })
    }

    pub fn matrix(&self) -> Option<&ZMatrix> {
        self.z.as_ref()
    }
}

impl EdgeSelector for PartitionSelector {
    fn kind(&self) -> SelectorKind {
        SelectorKind::Partition
    }

    fn prepare(&mut self, graph: &Graph, _query: Query, state: &crate::graph::LazyWeightState) -> Result<()> {
        let z = match &self.precomputed {
            Some(z) if z.num_vertices() == graph.num_vertices() && state.num_evaluated() == 0 => {
                ZMatrix::clone(z)
            }
            _ => ZMatrix::build(graph, self.beta, state.lazy_weights())?,
        };
        z.check_convergent()?;
        self.z = Some(z);
        Ok(())
    }

    fn select(&mut self, ctx: &SelectorContext<'_>) -> Result<Vec<EdgeId>> {
        let weights = ctx.state.lazy_weights();
        let z = self.z.as_mut().ok_or_else(|| Error::Config("partition selector not prepared".into()))?;
        if !z.is_reliable(ctx.query.start, ctx.query.goal) {
            *z = ZMatrix::build(ctx.graph, self.beta, weights)?;
            z.check_convergent()?;
        }
        argmax_earliest(ctx, TIE_TOLERANCE, |e| partition_edge_prob(z, ctx.graph, ctx.query, e, weights))
            .map(|e| vec![e])
    }

    fn edge_evaluated(&mut self, graph: &Graph, e: EdgeId, old: Weight, new: Weight) -> Result<()> {
        match self.z.as_mut() {
            Some(z) => z.reweight_edge(graph, e, old, new),
            None => Ok(()),
        }
    }
}
