//! Graph representation, edge weights and the lazy-evaluation bookkeeping
//! shared by every search in the crate.
//!
//! Weights are extended non-negative reals: `f64::INFINITY` is an ordinary
//! weight value (an edge in collision), not a missing edge.

use std::fmt;
use std::sync::Arc as Shared;

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;
pub type Weight = f64;

pub const INF: Weight = f64::INFINITY;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Directedness {
    Directed,
    Undirected,
}

impl fmt::Display for Directedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Directedness::Directed => f.write_str("directed"),
            Directedness::Undirected => f.write_str("undirected"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub source: VertexId,
    pub target: VertexId,
}

/// One traversal direction of an edge. Undirected edges expose two arcs
/// sharing a single edge id (and therefore a single evaluation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arc {
    pub from: VertexId,
    pub to: VertexId,
    pub edge: EdgeId,
}

impl Arc {
    /// Dense index over all arcs: `2 * edge` for the stored direction,
    /// `2 * edge + 1` for the reverse direction of an undirected edge.
    pub fn index(&self, graph: &Graph) -> usize {
        let forward = graph.edges[self.edge].source == self.from;
        2 * self.edge + usize::from(!forward)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    num_vertices: usize,
    directedness: Directedness,
    edges: Vec<Edge>,
    out_arcs: Vec<Vec<Arc>>,
    in_arcs: Vec<Vec<Arc>>,
}

impl Graph {
    /// Builds a graph whose edge ids are the positions in `edges`.
    pub fn new(
        num_vertices: usize,
        directedness: Directedness,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self> {
        let edges: Vec<Edge> = edges
            .into_iter()
            .map(|(source, target)| Edge { source, target })
            .collect();
        let mut out_arcs = vec![Vec::new(); num_vertices];
        let mut in_arcs = vec![Vec::new(); num_vertices];
        for (id, edge) in edges.iter().enumerate() {
            for v in [edge.source, edge.target] {
                if v >= num_vertices {
                    return Err(Error::InvalidVertex { vertex: v, num_vertices });
                }
            }
            if edge.source == edge.target {
                return Err(Error::SelfLoop { edge: id, vertex: edge.source });
            }
            let forward = Arc { from: edge.source, to: edge.target, edge: id };
            out_arcs[edge.source].push(forward);
            in_arcs[edge.target].push(forward);
            if directedness == Directedness::Undirected {
                let backward = Arc { from: edge.target, to: edge.source, edge: id };
                out_arcs[edge.target].push(backward);
                in_arcs[edge.source].push(backward);
            }
        }
        // Sorted by (neighbour, edge id): the lexicographic tie-break in the
        // inner search relies on this order.
        for arcs in &mut out_arcs {
            arcs.sort_by_key(|a| (a.to, a.edge));
        }
        for arcs in &mut in_arcs {
            arcs.sort_by_key(|a| (a.from, a.edge));
        }
        Ok(Graph { num_vertices, directedness, edges, out_arcs, in_arcs })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn directedness(&self) -> Directedness {
        self.directedness
    }

    pub fn is_directed(&self) -> bool {
        self.directedness == Directedness::Directed
    }

    pub fn edge(&self, e: EdgeId) -> Edge {
        self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Out-arcs of `v`; for undirected graphs, every incident edge.
    pub fn out_arcs(&self, v: VertexId) -> &[Arc] {
        &self.out_arcs[v]
    }

    pub fn in_arcs(&self, v: VertexId) -> &[Arc] {
        &self.in_arcs[v]
    }

    pub fn num_arc_slots(&self) -> usize {
        2 * self.edges.len()
    }

    /// Every traversal direction of edge `e` (one for directed graphs, two
    /// for undirected graphs).
    pub fn arcs_of(&self, e: EdgeId) -> impl Iterator<Item = Arc> {
        let Edge { source, target } = self.edges[e];
        let reverse = (self.directedness == Directedness::Undirected)
            .then_some(Arc { from: target, to: source, edge: e });
        std::iter::once(Arc { from: source, to: target, edge: e }).chain(reverse)
    }

    /// The arc of `e` leaving `from`, if `e` can be traversed from there.
    pub fn arc_from(&self, e: EdgeId, from: VertexId) -> Option<Arc> {
        self.arcs_of(e).find(|a| a.from == from)
    }

    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        self.out_arcs.iter().flatten().copied()
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v < self.num_vertices {
            Ok(())
        } else {
            Err(Error::InvalidVertex { vertex: v, num_vertices: self.num_vertices })
        }
    }

    pub fn check_edge(&self, e: EdgeId) -> Result<()> {
        if e < self.edges.len() {
            Ok(())
        } else {
            Err(Error::InvalidEdge { edge: e, num_edges: self.edges.len() })
        }
    }

    /// Validates a per-edge weight vector (one entry per edge, each in `[0, +inf]`).
    pub fn check_weights(&self, weights: &[Weight]) -> Result<()> {
        if weights.len() != self.edges.len() {
            return Err(Error::WeightCount { expected: self.edges.len(), actual: weights.len() });
        }
        match weights.iter().position(|w| !(*w >= 0.0)) {
            Some(edge) => Err(Error::InvalidWeight { edge, weight: weights[edge] }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Query {
    pub start: VertexId,
    pub goal: VertexId,
}

impl Query {
    pub fn new(graph: &Graph, start: VertexId, goal: VertexId) -> Result<Self> {
        graph.check_vertex(start)?;
        graph.check_vertex(goal)?;
        Ok(Query { start, goal })
    }

    pub fn reversed(self) -> Self {
        Query { start: self.goal, goal: self.start }
    }
}

/// A walk from a start vertex along a sequence of adjacent edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    vertices: Vec<VertexId>,
    edges: Vec<EdgeId>,
}

impl Path {
    pub fn trivial(v: VertexId) -> Self {
        Path { vertices: vec![v], edges: Vec::new() }
    }

    /// Builds a path from consecutive arcs leaving `start`.
    pub fn from_arcs(start: VertexId, arcs: impl IntoIterator<Item = Arc>) -> Result<Self> {
        let mut path = Path::trivial(start);
        for arc in arcs {
            if arc.from != path.end() {
                return Err(Error::InvalidPath(format!(
                    "arc {}->{} does not continue from vertex {}",
                    arc.from,
                    arc.to,
                    path.end()
                )));
            }
            path.vertices.push(arc.to);
            path.edges.push(arc.edge);
        }
        Ok(path)
    }

    /// Walks `edges` from `start`, checking adjacency in `graph`.
    pub fn from_edges(graph: &Graph, start: VertexId, edges: &[EdgeId]) -> Result<Self> {
        graph.check_vertex(start)?;
        let mut arcs = Vec::with_capacity(edges.len());
        let mut at = start;
        for &e in edges {
            graph.check_edge(e)?;
            let arc = graph.arc_from(e, at).ok_or_else(|| {
                Error::InvalidPath(format!("edge {e} cannot be traversed from vertex {at}"))
            })?;
            at = arc.to;
            arcs.push(arc);
        }
        Path::from_arcs(start, arcs)
    }

    pub fn start(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn end(&self) -> VertexId {
        *self.vertices.last().expect("a path has at least one vertex")
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        self.edges
            .iter()
            .enumerate()
            .map(|(i, &edge)| Arc { from: self.vertices[i], to: self.vertices[i + 1], edge })
    }

    pub fn connects(&self, query: Query) -> bool {
        self.start() == query.start && self.end() == query.goal
    }

    pub fn length(&self, weights: &[Weight]) -> Weight {
        path_length(&self.edges, weights)
    }
}

/// Sum of `weights` over `edges`; any infinite term makes the sum infinite.
pub fn path_length(edges: &[EdgeId], weights: &[Weight]) -> Weight {
    edges.iter().map(|&e| weights[e]).sum()
}

type WeightFn = dyn Fn(EdgeId) -> Weight + Send + Sync;

/// The expensive true edge-weight function, with per-run evaluation
/// accounting. Cloning shares the underlying function but not the counts.
#[derive(Clone)]
pub struct WeightOracle {
    weigh: Shared<WeightFn>,
    cache: Vec<Option<Weight>>,
    evaluations: usize,
}

impl fmt::Debug for WeightOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightOracle")
            .field("num_edges", &self.cache.len())
            .field("evaluations", &self.evaluations)
            .finish()
    }
}

impl WeightOracle {
    pub fn from_fn(
        num_edges: usize,
        weigh: impl Fn(EdgeId) -> Weight + Send + Sync + 'static,
    ) -> Self {
        WeightOracle { weigh: Shared::new(weigh), cache: vec![None; num_edges], evaluations: 0 }
    }

    pub fn from_weights(weights: impl Into<Shared<[Weight]>>) -> Self {
        let weights: Shared<[Weight]> = weights.into();
        let num_edges = weights.len();
        WeightOracle::from_fn(num_edges, move |e| weights[e])
    }

    /// A fresh oracle over the same weight function with zeroed counters.
    pub fn fresh(&self) -> Self {
        WeightOracle {
            weigh: Shared::clone(&self.weigh),
            cache: vec![None; self.cache.len()],
            evaluations: 0,
        }
    }

    /// Returns the true weight of `e`, counting the first request only.
    pub fn evaluate(&mut self, e: EdgeId) -> Weight {
        if let Some(w) = self.cache[e] {
            return w;
        }
        let w = (self.weigh)(e);
        self.cache[e] = Some(w);
        self.evaluations += 1;
        w
    }

    /// Reads the true weight without counting an evaluation. For oracles,
    /// invariant checks and reporting only.
    pub fn peek(&self, e: EdgeId) -> Weight {
        self.cache[e].unwrap_or_else(|| (self.weigh)(e))
    }

    pub fn is_evaluated(&self, e: EdgeId) -> bool {
        self.cache[e].is_some()
    }

    pub fn evaluation_count(&self) -> usize {
        self.evaluations
    }

    pub fn num_edges(&self) -> usize {
        self.cache.len()
    }
}

/// The evaluated-edge set and the lazy weight view over it.
#[derive(Debug, Clone, PartialEq)]
pub struct LazyWeightState {
    estimates: Vec<Weight>,
    lazy: Vec<Weight>,
    evaluated: Vec<bool>,
    order: Vec<EdgeId>,
}

impl LazyWeightState {
    pub fn new(estimates: &[Weight]) -> Self {
        LazyWeightState {
            estimates: estimates.to_vec(),
            lazy: estimates.to_vec(),
            evaluated: vec![false; estimates.len()],
            order: Vec::new(),
        }
    }

    /// Evaluates `e` through the oracle unless it is already known.
    pub fn evaluate_edge(&mut self, oracle: &mut WeightOracle, e: EdgeId) -> Weight {
        if self.evaluated[e] {
            return self.lazy[e];
        }
        let w = oracle.evaluate(e);
        self.record(e, w);
        w
    }

    /// Marks `e` as evaluated with known weight `w`, bypassing any oracle.
    pub fn record(&mut self, e: EdgeId, w: Weight) {
        debug_assert!(!self.evaluated[e], "edge {e} recorded twice");
        self.lazy[e] = w;
        self.evaluated[e] = true;
        self.order.push(e);
    }

    pub fn lazy_weight(&self, e: EdgeId) -> Weight {
        self.lazy[e]
    }

    pub fn lazy_weights(&self) -> &[Weight] {
        &self.lazy
    }

    pub fn estimate(&self, e: EdgeId) -> Weight {
        self.estimates[e]
    }

    pub fn estimates(&self) -> &[Weight] {
        &self.estimates
    }

    pub fn is_evaluated(&self, e: EdgeId) -> bool {
        self.evaluated[e]
    }

    /// Evaluated edges in evaluation order.
    pub fn evaluated_edges(&self) -> &[EdgeId] {
        &self.order
    }

    pub fn num_evaluated(&self) -> usize {
        self.order.len()
    }

    pub fn num_edges(&self) -> usize {
        self.lazy.len()
    }

    pub fn is_fully_evaluated(&self, edges: &[EdgeId]) -> bool {
        edges.iter().all(|&e| self.evaluated[e])
    }
}
