//! Exact single-pair shortest paths over an arbitrary weight view.
//!
//! Distances are computed by a reverse Dijkstra from the goal; the path is
//! then read off the "tight" arcs (`w(a) + d(a.to) == d(a.from)`) by a
//! depth-first walk in increasing neighbour order, which yields the
//! lexicographically smallest vertex sequence among all minimal paths.
//! Infinite-weight arcs are never relaxed.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::Result;
use crate::graph::{Arc, Graph, Path, Query, VertexId, Weight, INF};

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub path: Option<Path>,
    /// `+inf` when no finite path exists.
    pub length: Weight,
}

impl SearchResult {
    pub fn no_path() -> Self {
        SearchResult { path: None, length: INF }
    }

    pub fn found(path: Path, length: Weight) -> Self {
        SearchResult { path: Some(path), length }
    }

    pub fn is_found(&self) -> bool {
        self.path.is_some()
    }
}

#[derive(Debug, Clone, Copy)]
struct HeapItem {
    dist: Weight,
    vertex: VertexId,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    // Reversed: BinaryHeap is a max-heap.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

/// Reusable buffers for repeated searches on graphs of the same size.
#[derive(Debug, Default, Clone)]
pub struct SearchWorkspace {
    dist: Vec<Weight>,
    heap: BinaryHeap<HeapItem>,
    on_path: Vec<bool>,
}

impl SearchWorkspace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Distance from every vertex to `target` (reverse search over in-arcs).
    pub fn distances_to(&mut self, graph: &Graph, target: VertexId, weights: &[Weight]) -> &[Weight] {
        self.run(graph, target, weights, Direction::Reverse);
        &self.dist
    }

    /// Distance from `source` to every vertex.
    pub fn distances_from(&mut self, graph: &Graph, source: VertexId, weights: &[Weight]) -> &[Weight] {
        self.run(graph, source, weights, Direction::Forward);
        &self.dist
    }

    fn run(&mut self, graph: &Graph, root: VertexId, weights: &[Weight], direction: Direction) {
        let n = graph.num_vertices();
        self.dist.clear();
        self.dist.resize(n, INF);
        self.heap.clear();
        self.dist[root] = 0.0;
        self.heap.push(HeapItem { dist: 0.0, vertex: root });
        while let Some(HeapItem { dist, vertex }) = self.heap.pop() {
            if dist > self.dist[vertex] {
                continue;
            }
            let arcs = match direction {
                Direction::Forward => graph.out_arcs(vertex),
                Direction::Reverse => graph.in_arcs(vertex),
            };
            for arc in arcs {
                let w = weights[arc.edge];
                if w == INF {
                    continue;
                }
                let next = match direction {
                    Direction::Forward => arc.to,
                    Direction::Reverse => arc.from,
                };
                let candidate = dist + w;
                if candidate < self.dist[next] {
                    self.dist[next] = candidate;
                    self.heap.push(HeapItem { dist: candidate, vertex: next });
                }
            }
        }
    }

    /// Minimal-length path under `weights`, lexicographically smallest
    /// vertex sequence among ties. Vertices in `query` must be valid.
    pub fn shortest_path(&mut self, graph: &Graph, query: Query, weights: &[Weight]) -> SearchResult {
        if query.start == query.goal {
            return SearchResult::found(Path::trivial(query.start), 0.0);
        }
        self.run(graph, query.goal, weights, Direction::Reverse);
        if self.dist[query.start] == INF {
            return SearchResult::no_path();
        }
        self.on_path.clear();
        self.on_path.resize(graph.num_vertices(), false);
        let mut first = None;
        walk_tight_paths(graph, query, weights, &self.dist, &mut self.on_path, |arcs| {
            first = Some(arcs.to_vec());
            false
        });
        let arcs = first.expect("a finite distance implies a tight path");
        let path = Path::from_arcs(query.start, arcs).expect("tight arcs are consecutive");
        let length = path.length(weights);
        SearchResult::found(path, length)
    }
}

#[derive(Clone, Copy)]
enum Direction {
    Forward,
    Reverse,
}

/// Depth-first enumeration of simple tight paths in lexicographic order.
/// `visit` returns whether to keep enumerating.
fn walk_tight_paths(
    graph: &Graph,
    query: Query,
    weights: &[Weight],
    dist: &[Weight],
    on_path: &mut [bool],
    mut visit: impl FnMut(&[Arc]) -> bool,
) {
    let tight = |arc: &Arc| {
        let w = weights[arc.edge];
        w != INF && dist[arc.to] != INF && w + dist[arc.to] == dist[arc.from]
    };
    let mut arcs: Vec<Arc> = Vec::new();
    let mut cursors: Vec<usize> = vec![0];
    let mut current = query.start;
    on_path[current] = true;
    loop {
        if current == query.goal {
            let keep_going = visit(&arcs);
            if !keep_going {
                for arc in &arcs {
                    on_path[arc.to] = false;
                }
                on_path[query.start] = false;
                return;
            }
        } else {
            let out = graph.out_arcs(current);
            let cursor = cursors.last_mut().expect("cursor per depth");
            let next = (*cursor..out.len()).find(|&i| tight(&out[i]) && !on_path[out[i].to]);
            if let Some(i) = next {
                *cursor = i + 1;
                let arc = out[i];
                arcs.push(arc);
                on_path[arc.to] = true;
                cursors.push(0);
                current = arc.to;
                continue;
            }
        }
        // Backtrack.
        cursors.pop();
        on_path[current] = false;
        match arcs.pop() {
            Some(arc) => current = arc.from,
            None => return,
        }
    }
}

pub fn shortest_path(graph: &Graph, query: Query, weights: &[Weight]) -> Result<SearchResult> {
    graph.check_vertex(query.start)?;
    graph.check_vertex(query.goal)?;
    graph.check_weights(weights)?;
    Ok(SearchWorkspace::new().shortest_path(graph, query, weights))
}

pub fn distances_to(graph: &Graph, target: VertexId, weights: &[Weight]) -> Vec<Weight> {
    SearchWorkspace::new().distances_to(graph, target, weights).to_vec()
}

pub fn distances_from(graph: &Graph, source: VertexId, weights: &[Weight]) -> Vec<Weight> {
    SearchWorkspace::new().distances_from(graph, source, weights).to_vec()
}

/// Every simple minimal-length path, in lexicographic vertex order.
/// Empty when no finite path exists. Intended for small graphs.
pub fn all_shortest_paths(graph: &Graph, query: Query, weights: &[Weight]) -> Result<Vec<Path>> {
    graph.check_vertex(query.start)?;
    graph.check_vertex(query.goal)?;
    graph.check_weights(weights)?;
    if query.start == query.goal {
        return Ok(vec![Path::trivial(query.start)]);
    }
    let dist = distances_to(graph, query.goal, weights);
    if dist[query.start] == INF {
        return Ok(Vec::new());
    }
    let mut on_path = vec![false; graph.num_vertices()];
    let mut paths = Vec::new();
    walk_tight_paths(graph, query, weights, &dist, &mut on_path, |arcs| {
        paths.push(Path::from_arcs(query.start, arcs.iter().copied()).expect("consecutive arcs"));
        true
    });
    Ok(paths)
}
