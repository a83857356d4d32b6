//! A* with reopening and Lazy Weighted A* (without a CLOSED list), both
//! guided by the dynamic lazy heuristic.
//!
//! Both searches are exposed as explicit state machines: every allowable
//! next step can be listed with `choices` and taken with `apply`, which the
//! equivalence checks use to enumerate tie-breaking alternatives.

use crate::error::{Error, Result};
use crate::graph::{Arc, EdgeId, Graph, LazyWeightState, Path, Query, VertexId, Weight, WeightOracle, INF};
use crate::search::{distances_to, SearchResult};

/// Exact distance to `goal` under the current lazy weights.
pub fn h_lazy(graph: &Graph, goal: VertexId, state: &LazyWeightState) -> Vec<Weight> {
    distances_to(graph, goal, state.lazy_weights())
}

/// Exact distance to `goal` under the estimates alone.
pub fn h_est(graph: &Graph, goal: VertexId, estimates: &[Weight]) -> Vec<Weight> {
    distances_to(graph, goal, estimates)
}

/// Edges in the order they were first evaluated.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeTrace {
    pub edges: Vec<EdgeId>,
}

/// A search that advances one queue pop at a time.
pub trait SteppedSearch: Clone {
    type Choice: Clone + std::fmt::Debug;

    /// Allowable next pops under minimal-key tie-breaking. Empty once the
    /// search has terminated.
    fn choices(&self) -> Vec<Self::Choice>;

    fn apply(&mut self, choice: &Self::Choice, oracle: &mut WeightOracle) -> Result<()>;

    fn lazy_state(&self) -> &LazyWeightState;

    /// The search result; `None` while still running.
    fn result(&self) -> Option<SearchResult>;

    /// Checks the search's structural invariants against the true weights.
    fn check_invariants(&self, oracle: &WeightOracle) -> Result<()>;

    /// Hashable snapshot of the complete search state.
    fn signature(&self) -> Vec<u64>;
}

/// Steps `search` to completion, asserting its invariants before every pop
/// and once more at the end. `pick` chooses among the tied pops. Returns the
/// result, the final lazy state and the number of pops.
pub fn run_checked<S: SteppedSearch>(
    mut search: S,
    oracle: &mut WeightOracle,
    mut pick: impl FnMut(&[S::Choice]) -> usize,
) -> Result<(SearchResult, LazyWeightState, usize)> {
    let mut pops = 0;
    loop {
        search.check_invariants(oracle)?;
        let choices = search.choices();
        if choices.is_empty() {
            break;
        }
        let i = pick(&choices);
        search.apply(&choices[i], oracle)?;
        pops += 1;
    }
    let result = search.result().ok_or_else(|| Error::InvariantViolation("search stopped without a result".into()))?;
    Ok((result, search.lazy_state().clone(), pops))
}

fn bits(values: &[Weight]) -> impl Iterator<Item = u64> + '_ {
    values.iter().map(|w| w.to_bits())
}

fn flags(values: &[bool]) -> impl Iterator<Item = u64> + '_ {
    values.chunks(64).map(|chunk| chunk.iter().enumerate().fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i)))
}

/// Follows parent arcs back from the goal.
fn parent_path(query: Query, parent: &[Option<Arc>], weights: &[Weight]) -> Result<SearchResult> {
    let mut arcs = Vec::new();
    let mut v = query.goal;
    while v != query.start {
        let arc = parent[v].ok_or_else(|| Error::InvalidPath(format!("vertex {v} has no parent")))?;
        arcs.push(arc);
        v = arc.from;
        if arcs.len() > parent.len() {
            return Err(Error::InvalidPath("parent pointers form a cycle".into()));
        }
    }
    arcs.reverse();
    let path = Path::from_arcs(query.start, arcs)?;
    let length = path.length(weights);
    Ok(SearchResult::found(path, length))
}

/// A* that reopens vertices whose g-value improves. The first expansion of
/// a vertex evaluates all its out-edges.
#[derive(Debug, Clone)]
pub struct AStarReopen<'g> {
    graph: &'g Graph,
    query: Query,
    state: LazyWeightState,
    g: Vec<Weight>,
    parent: Vec<Option<Arc>>,
    open: Vec<bool>,
    discovered: Vec<bool>,
    expanded: Vec<bool>,
    h: Vec<Weight>,
    done: Option<SearchResult>,
}

impl<'g> AStarReopen<'g> {
    pub fn new(graph: &'g Graph, query: Query, estimates: &[Weight]) -> Result<Self> {
        graph.check_vertex(query.start)?;
        graph.check_vertex(query.goal)?;
        graph.check_weights(estimates)?;
        let n = graph.num_vertices();
        let state = LazyWeightState::new(estimates);
        let h = h_lazy(graph, query.goal, &state);
        let mut search = AStarReopen {
            graph,
            query,
            state,
            g: vec![INF; n],
            parent: vec![None; n],
            open: vec![false; n],
            discovered: vec![false; n],
            expanded: vec![false; n],
            h,
            done: None,
        };
        search.g[query.start] = 0.0;
        search.open[query.start] = true;
        search.discovered[query.start] = true;
        search.settle();
        Ok(search)
    }

    pub fn f(&self, v: VertexId) -> Weight {
        self.g[v] + self.h[v]
    }

    pub fn g(&self, v: VertexId) -> Weight {
        self.g[v]
    }

    pub fn is_open(&self, v: VertexId) -> bool {
        self.open[v]
    }

    pub fn is_expanded(&self, v: VertexId) -> bool {
        self.expanded[v]
    }

    /// Edges the next expansion of `v` would evaluate.
    pub fn new_edges(&self, v: VertexId) -> Vec<EdgeId> {
        if self.expanded[v] {
            return Vec::new();
        }
        let mut edges: Vec<EdgeId> =
            self.graph.out_arcs(v).iter().map(|a| a.edge).filter(|&e| !self.state.is_evaluated(e)).collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    fn min_f(&self) -> Weight {
        (0..self.g.len()).filter(|&v| self.open[v]).map(|v| self.f(v)).fold(INF, f64::min)
    }

    /// Ends the search with no path once no open vertex has a finite f.
    fn settle(&mut self) {
        if self.done.is_none() && self.min_f() == INF {
            self.done = Some(SearchResult::no_path());
        }
    }

    fn expand(&mut self, v: VertexId, oracle: &mut WeightOracle) {
        self.open[v] = false;
        if !self.expanded[v] {
            let new = self.new_edges(v);
            self.expanded[v] = true;
            for &e in &new {
                self.state.evaluate_edge(oracle, e);
            }
            if !new.is_empty() {
                self.h = h_lazy(self.graph, self.query.goal, &self.state);
            }
        }
        for &arc in self.graph.out_arcs(v) {
            let u = arc.to;
            if !self.discovered[u] {
                self.discovered[u] = true;
                self.open[u] = true;
            }
            let candidate = self.g[v] + self.state.lazy_weight(arc.edge);
            if candidate < self.g[u] {
                self.g[u] = candidate;
                self.parent[u] = Some(arc);
                self.open[u] = true;
            }
        }
    }

    /// Runs with deterministic tie-breaking: the goal first, then the
    /// smallest vertex id.
    pub fn run(mut self, oracle: &mut WeightOracle) -> Result<(SearchResult, LazyWeightState)> {
        loop {
            if cfg!(debug_assertions) {
                self.check_invariants(oracle)?;
            }
            let choices = self.choices();
            let Some(&first) = choices.first() else { break };
            let pick = if choices.contains(&self.query.goal) { self.query.goal } else { first };
            self.apply(&pick, oracle)?;
        }
        let result = self.result().expect("terminated");
        Ok((result, self.state))
    }
}

impl SteppedSearch for AStarReopen<'_> {
    type Choice = VertexId;

    fn choices(&self) -> Vec<VertexId> {
        if self.done.is_some() {
            return Vec::new();
        }
        let best = self.min_f();
        (0..self.g.len()).filter(|&v| self.open[v] && self.f(v) == best).collect()
    }

    fn apply(&mut self, &v: &VertexId, oracle: &mut WeightOracle) -> Result<()> {
        if self.done.is_some() || !self.open[v] {
            return Err(Error::Config(format!("vertex {v} is not open")));
        }
        if v == self.query.goal {
            self.done = Some(parent_path(self.query, &self.parent, self.state.lazy_weights())?);
            return Ok(());
        }
        self.expand(v, oracle);
        self.settle();
        Ok(())
    }

    fn lazy_state(&self) -> &LazyWeightState {
        &self.state
    }

    fn result(&self) -> Option<SearchResult> {
        self.done.clone()
    }

    fn check_invariants(&self, oracle: &WeightOracle) -> Result<()> {
        for arc in self.graph.arcs() {
            let (v, u) = (arc.from, arc.to);
            if !self.discovered[v] || self.open[v] {
                continue;
            }
            if !self.discovered[u] {
                return Err(Error::InvariantViolation(format!(
                    "A*: {v} is discovered and closed but its successor {u} is undiscovered"
                )));
            }
            if self.g[v] + oracle.peek(arc.edge) < self.g[u] {
                return Err(Error::InvariantViolation(format!(
                    "A*: {v} is closed but g[{v}] + w({v},{u}) < g[{u}]"
                )));
            }
        }
        Ok(())
    }

    fn signature(&self) -> Vec<u64> {
        bits(&self.g)
            .chain(flags(&self.open))
            .chain(flags(&self.discovered))
            .chain(flags(&self.expanded))
            .chain(self.state.evaluated_edges().iter().map(|&e| e as u64))
            .collect()
    }
}

pub fn run_astar_reopen(
    graph: &Graph,
    query: Query,
    oracle: &mut WeightOracle,
    estimates: &[Weight],
) -> Result<(SearchResult, EdgeTrace)> {
    let (result, state) = AStarReopen::new(graph, query, estimates)?.run(oracle)?;
    Ok((result, EdgeTrace { edges: state.evaluated_edges().to_vec() }))
}

/// One pop of Lazy Weighted A*.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LwaChoice {
    Vertex(VertexId),
    Edge(Arc),
}

/// Lazy Weighted A* without CLOSED: a vertex queue keyed `g + h` and an
/// edge queue keyed `g + w_lazy + h`; edges are evaluated when popped
/// unless they cannot improve their head.
#[derive(Debug, Clone)]
pub struct LwaStar<'g> {
    graph: &'g Graph,
    query: Query,
    state: LazyWeightState,
    g: Vec<Weight>,
    parent: Vec<Option<Arc>>,
    in_qv: Vec<bool>,
    in_qe: Vec<bool>,
    h: Vec<Weight>,
}

impl<'g> LwaStar<'g> {
    pub fn new(graph: &'g Graph, query: Query, estimates: &[Weight]) -> Result<Self> {
        graph.check_vertex(query.start)?;
        graph.check_vertex(query.goal)?;
        graph.check_weights(estimates)?;
        let n = graph.num_vertices();
        let state = LazyWeightState::new(estimates);
        let h = h_lazy(graph, query.goal, &state);
        let mut search = LwaStar {
            graph,
            query,
            state,
            g: vec![INF; n],
            parent: vec![None; n],
            in_qv: vec![false; n],
            in_qe: vec![false; graph.num_arc_slots()],
            h,
        };
        search.g[query.start] = 0.0;
        search.in_qv[query.start] = true;
        Ok(search)
    }

    pub fn g(&self, v: VertexId) -> Weight {
        self.g[v]
    }

    fn vertex_key(&self, v: VertexId) -> Weight {
        self.g[v] + self.h[v]
    }

    fn edge_key(&self, arc: &Arc) -> Weight {
        self.g[arc.from] + self.state.lazy_weight(arc.edge) + self.h[arc.to]
    }

    fn queued_arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        self.graph.arcs().filter(|a| self.in_qe[a.index(self.graph)])
    }

    pub fn run(mut self, oracle: &mut WeightOracle) -> Result<(SearchResult, LazyWeightState)> {
        loop {
            if cfg!(debug_assertions) {
                self.check_invariants(oracle)?;
            }
            let Some(choice) = self.choices().into_iter().next() else { break };
            self.apply(&choice, oracle)?;
        }
        let result = self.result().expect("terminated");
        Ok((result, self.state))
    }
}

impl SteppedSearch for LwaStar<'_> {
    type Choice = LwaChoice;

    fn choices(&self) -> Vec<LwaChoice> {
        let n = self.g.len();
        let top_v = (0..n).filter(|&v| self.in_qv[v]).map(|v| self.vertex_key(v)).fold(INF, f64::min);
        let top_e = self.queued_arcs().map(|a| self.edge_key(&a)).fold(INF, f64::min);
        if !(top_v.min(top_e) < self.g[self.query.goal]) {
            return Vec::new();
        }
        if top_v <= top_e {
            (0..n).filter(|&v| self.in_qv[v] && self.vertex_key(v) == top_v).map(LwaChoice::Vertex).collect()
        } else {
            self.queued_arcs().filter(|a| self.edge_key(a) == top_e).map(LwaChoice::Edge).collect()
        }
    }

    fn apply(&mut self, choice: &LwaChoice, oracle: &mut WeightOracle) -> Result<()> {
        match *choice {
            LwaChoice::Vertex(v) => {
                if !self.in_qv[v] {
                    return Err(Error::Config(format!("vertex {v} is not queued")));
                }
                self.in_qv[v] = false;
                for arc in self.graph.out_arcs(v) {
                    self.in_qe[arc.index(self.graph)] = true;
                }
            }
            LwaChoice::Edge(arc) => {
                let slot = arc.index(self.graph);
                if !self.in_qe[slot] {
                    return Err(Error::Config(format!("arc {}->{} is not queued", arc.from, arc.to)));
                }
                self.in_qe[slot] = false;
                let (v, u) = (arc.from, arc.to);
                if self.g[u] <= self.g[v] + self.state.lazy_weight(arc.edge) {
                    return Ok(());
                }
                let fresh = !self.state.is_evaluated(arc.edge);
                let w = self.state.evaluate_edge(oracle, arc.edge);
                if fresh {
                    self.h = h_lazy(self.graph, self.query.goal, &self.state);
                }
                let candidate = self.g[v] + w;
                if candidate < self.g[u] {
                    self.g[u] = candidate;
                    self.parent[u] = Some(arc);
                    self.in_qv[u] = true;
                }
            }
        }
        Ok(())
    }

    fn lazy_state(&self) -> &LazyWeightState {
        &self.state
    }

    fn result(&self) -> Option<SearchResult> {
        if !self.choices().is_empty() {
            return None;
        }
        if self.g[self.query.goal] == INF {
            return Some(SearchResult::no_path());
        }
        Some(parent_path(self.query, &self.parent, self.state.lazy_weights()).expect("parents lead to start"))
    }

    fn check_invariants(&self, oracle: &WeightOracle) -> Result<()> {
        for arc in self.graph.arcs() {
            let (v, u) = (arc.from, arc.to);
            let w = oracle.peek(arc.edge).max(self.state.lazy_weight(arc.edge));
            if self.g[v] + w < self.g[u] && !self.in_qv[v] && !self.in_qe[arc.index(self.graph)] {
                return Err(Error::InvariantViolation(format!(
                    "LWA*: g[{v}] + max(w, w_lazy) < g[{u}] but neither {v} nor ({v},{u}) is queued"
                )));
            }
        }
        Ok(())
    }

    fn signature(&self) -> Vec<u64> {
        bits(&self.g)
            .chain(flags(&self.in_qv))
            .chain(flags(&self.in_qe))
            .chain(self.state.evaluated_edges().iter().map(|&e| e as u64))
            .collect()
    }
}

pub fn run_lwastar(
    graph: &Graph,
    query: Query,
    oracle: &mut WeightOracle,
    estimates: &[Weight],
) -> Result<(SearchResult, EdgeTrace)> {
    let (result, state) = LwaStar::new(graph, query, estimates)?.run(oracle)?;
    Ok((result, EdgeTrace { edges: state.evaluated_edges().to_vec() }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Directedness;
    use crate::search::shortest_path;

    fn line() -> Graph {
        Graph::new(3, Directedness::Undirected, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn heuristics_on_the_line() {
        let g = line();
        let mut state = LazyWeightState::new(&[1.0, 1.0]);
        assert_eq!(h_lazy(&g, 2, &state), vec![2.0, 1.0, 0.0]);
        assert_eq!(h_est(&g, 2, &[1.0, 1.0]), vec![2.0, 1.0, 0.0]);
        state.record(1, INF);
        assert_eq!(h_lazy(&g, 2, &state), vec![INF, INF, 0.0]);
    }

    #[test]
    fn astar_line_expands_in_order() {
        let g = line();
        let mut oracle = WeightOracle::from_weights(vec![1.0, 1.0]);
        let (r, trace) = run_astar_reopen(&g, Query { start: 0, goal: 2 }, &mut oracle, &[1.0, 1.0]).unwrap();
        assert_eq!(r.length, 2.0);
        assert_eq!(trace.edges, vec![0, 1]);
    }

    #[test]
    fn astar_reopens_after_misleading_estimate() {
        // 0 -> 1 -> 3 is short; 0 -> 2 -> 1 looks short but 2 -> 1 is heavy,
        // and 0 -> 1 direct is cheaper than it appears once evaluated.
        let g = Graph::new(4, Directedness::Directed, [(0, 1), (0, 2), (2, 1), (1, 3)]).unwrap();
        let truth = vec![3.0, 1.0, 1.0, 1.0];
        let est = [3.0, 0.5, 0.5, 1.0];
        let mut oracle = WeightOracle::from_weights(truth.clone());
        let (r, _) = run_astar_reopen(&g, Query { start: 0, goal: 3 }, &mut oracle, &est).unwrap();
        let optimum = shortest_path(&g, Query { start: 0, goal: 3 }, &truth).unwrap().length;
        assert_eq!(r.length, optimum);
    }

    #[test]
    fn reopening_occurs_with_inconsistent_lazy_heuristic() {
        // Vertex 1 is first reached through the direct edge (g = 4), then
        // improved through 2 (g = 2) after it was expanded.
        let g = Graph::new(4, Directedness::Directed, [(0, 1), (0, 2), (2, 1), (1, 3)]).unwrap();
        let truth = vec![4.0, 1.0, 1.0, 1.0];
        let est = [1.0, 1.0, 1.0, 1.0];
        let mut search = AStarReopen::new(&g, Query { start: 0, goal: 3 }, &est).unwrap();
        let mut oracle = WeightOracle::from_weights(truth.clone());
        let mut expansions = Vec::new();
        while let Some(&v) = search.choices().first() {
            expansions.push(v);
            search.apply(&v, &mut oracle).unwrap();
            search.check_invariants(&oracle).unwrap();
        }
        assert_eq!(search.result().unwrap().length, 3.0);
        assert!(expansions.len() >= 4);
    }

    #[test]
    fn start_equals_goal_evaluates_nothing() {
        let g = line();
        let mut oracle = WeightOracle::from_weights(vec![1.0, 1.0]);
        let (r, t) = run_astar_reopen(&g, Query { start: 1, goal: 1 }, &mut oracle, &[1.0, 1.0]).unwrap();
        assert_eq!((r.length, t.edges.len()), (0.0, 0));
        let (r, t) = run_lwastar(&g, Query { start: 1, goal: 1 }, &mut oracle, &[1.0, 1.0]).unwrap();
        assert_eq!((r.length, t.edges.len()), (0.0, 0));
    }

    #[test]
    fn lwastar_line_evaluates_only_path_edges() {
        let g = line();
        let mut oracle = WeightOracle::from_weights(vec![1.0, 1.0]);
        let (r, trace) = run_lwastar(&g, Query { start: 0, goal: 2 }, &mut oracle, &[1.0, 1.0]).unwrap();
        assert_eq!(r.length, 2.0);
        assert_eq!(trace.edges, vec![0, 1]);
    }

    #[test]
    fn lwastar_skips_useless_edges() {
        // Two unit routes 0-1-3 and 0-2-3, then a heavy 3-4. Once 3 is
        // reached via 1, popping (2,3) fails the usefulness test.
        let g = Graph::new(5, Directedness::Directed, [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)]).unwrap();
        let mut oracle = WeightOracle::from_weights(vec![1.0, 1.0, 1.0, 1.0, 5.0]);
        let (r, trace) = run_lwastar(&g, Query { start: 0, goal: 4 }, &mut oracle, &[1.0; 5]).unwrap();
        assert_eq!(r.length, 7.0);
        assert_eq!(trace.edges, vec![0, 1, 2, 4]);
    }

    #[test]
    fn no_path_when_everything_is_blocked() {
        let g = line();
        let mut oracle = WeightOracle::from_weights(vec![INF, INF]);
        let (r, _) = run_astar_reopen(&g, Query { start: 0, goal: 2 }, &mut oracle, &[1.0, 1.0]).unwrap();
        assert!(!r.is_found());
        let mut oracle = WeightOracle::from_weights(vec![INF, INF]);
        let (r, _) = run_lwastar(&g, Query { start: 0, goal: 2 }, &mut oracle, &[1.0, 1.0]).unwrap();
        assert!(!r.is_found());
    }
}
