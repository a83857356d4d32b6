//! The LazySP main loop and its run trace.
//!
//! Each iteration finds a shortest path under the lazy weights. If every
//! edge on it is evaluated the path is returned; otherwise the selector
//! picks edges of it to evaluate and the loop repeats.

use std::collections::HashSet;
use std::io::Write;
use std::time::{Duration, Instant};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, LazyWeightState, Path, Query, Weight, WeightOracle, INF};
use crate::search::{SearchResult, SearchWorkspace};
use crate::selectors::{EdgeSelector, SelectorContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineOptions {
    /// Keep selecting on the same candidate while every new evaluation came
    /// back no heavier than its lazy value, skipping the re-search.
    pub immediate_expansion: bool,
    /// Return "no finite path" as soon as the lazy search finds none. When
    /// off, the loop keeps evaluating a least-infinite candidate until it is
    /// fully evaluated.
    pub infinite_early_return: bool,
    /// Stop with [`Error::IterationLimit`] after this many selector calls.
    pub max_iterations: Option<usize>,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { immediate_expansion: false, infinite_early_return: true, max_iterations: None }
    }
}

/// One selector invocation, or the terminal record (empty `selected`).
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Empty when the lazy search found no candidate at all.
    pub candidate: Vec<EdgeId>,
    pub candidate_lazy_length: Weight,
    pub selected: Vec<EdgeId>,
    /// Newly evaluated edges and their true weights, in evaluation order.
    pub outcomes: Vec<(EdgeId, Weight)>,
}

impl IterationRecord {
    pub fn is_terminal(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "iter": self.iteration,
            "candidate_edge_ids": self.candidate,
            "candidate_lazy_length": weight_to_json(self.candidate_lazy_length),
            "selected": self.selected,
            "outcomes": self
                .outcomes
                .iter()
                .map(|&(edge, w)| json!({ "edge": edge, "weight": weight_to_json(w) }))
                .collect::<Vec<_>>(),
        })
    }
}

/// Finite weights as numbers, infinity as the string `"inf"`.
pub fn weight_to_json(w: Weight) -> Value {
    if w == INF {
        Value::from("inf")
    } else {
        Value::from(w)
    }
}

/// Edge counts of one distinct candidate path, split by evaluation status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathBar {
    pub edges: Vec<EdgeId>,
    /// Evaluated before the path first became the candidate.
    pub already_evaluated: usize,
    /// Evaluated while it was the candidate, finite weight.
    pub newly_valid: usize,
    /// Evaluated while it was the candidate, infinite weight.
    pub newly_invalid: usize,
    pub unevaluated: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunTrace {
    pub records: Vec<IterationRecord>,
    pub final_path: Option<Path>,
    /// Inner shortest-path searches performed.
    pub searches: usize,
    pub search_time: Duration,
    pub selector_time: Duration,
}

impl RunTrace {
    /// Number of selector invocations.
    pub fn iterations(&self) -> usize {
        self.records.iter().filter(|r| !r.is_terminal()).count()
    }

    pub fn edges_evaluated(&self) -> usize {
        self.records.iter().map(|r| r.outcomes.len()).sum()
    }

    /// Evaluated edges in evaluation order.
    pub fn evaluated_edges(&self) -> Vec<EdgeId> {
        self.records.iter().flat_map(|r| r.outcomes.iter().map(|&(e, _)| e)).collect()
    }

    pub fn distinct_candidates(&self) -> usize {
        self.records
            .iter()
            .filter(|r| !r.candidate.is_empty())
            .map(|r| &r.candidate)
            .collect::<HashSet<_>>()
            .len()
    }

    /// One bar per distinct candidate path in first-seen order.
    pub fn path_bars(&self) -> Vec<PathBar> {
        let mut bars: Vec<PathBar> = Vec::new();
        let mut evaluated: HashSet<EdgeId> = HashSet::new();
        for record in &self.records {
            if !record.candidate.is_empty() {
                if !bars.iter().any(|b| b.edges == record.candidate) {
                    let already = record.candidate.iter().filter(|e| evaluated.contains(e)).count();
                    bars.push(PathBar {
                        edges: record.candidate.clone(),
                        already_evaluated: already,
                        newly_valid: 0,
                        newly_invalid: 0,
                        unevaluated: record.candidate.len() - already,
                    });
                }
                let bar = bars.iter_mut().find(|b| b.edges == record.candidate).expect("bar exists");
                for &(e, w) in &record.outcomes {
                    if bar.edges.contains(&e) && !evaluated.contains(&e) {
                        bar.unevaluated -= 1;
                        if w == INF {
                            bar.newly_invalid += 1;
                        } else {
                            bar.newly_valid += 1;
                        }
                    }
                }
            }
            evaluated.extend(record.outcomes.iter().map(|&(e, _)| e));
        }
        bars
    }

    /// One JSON object per line, terminal record last.
    pub fn write_jsonl(&self, mut out: impl Write) -> Result<()> {
        for record in &self.records {
            serde_json::to_writer(&mut out, &record.to_json())?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Runs LazySP from scratch on `query`. The oracle is only consulted for
/// edges not yet evaluated in this run.
pub fn run_lazysp(
    graph: &Graph,
    query: Query,
    oracle: &mut WeightOracle,
    estimates: &[Weight],
    selector: &mut dyn EdgeSelector,
    options: EngineOptions,
) -> Result<(SearchResult, RunTrace)> {
    graph.check_vertex(query.start)?;
    graph.check_vertex(query.goal)?;
    graph.check_weights(estimates)?;
    if oracle.num_edges() != graph.num_edges() {
        return Err(Error::WeightCount { expected: graph.num_edges(), actual: oracle.num_edges() });
    }
    let mut state = LazyWeightState::new(estimates);
    let mut trace = RunTrace::default();
    let mut workspace = SearchWorkspace::new();

    let clock = Instant::now();
    selector.prepare(graph, query, &state)?;
    trace.selector_time += clock.elapsed();

    let mut iteration = 1;
    let mut reuse: Option<Path> = None;
    loop {
        let candidate = match reuse.take() {
            Some(path) => path,
            None => {
                let clock = Instant::now();
                let found = candidate_search(&mut workspace, graph, query, &state, options);
                trace.search_time += clock.elapsed();
                trace.searches += 1;
                match found {
                    Some(path) => path,
                    None => {
                        trace.records.push(IterationRecord {
                            iteration,
                            candidate: Vec::new(),
                            candidate_lazy_length: INF,
                            selected: Vec::new(),
                            outcomes: Vec::new(),
                        });
                        return Ok((SearchResult::no_path(), trace));
                    }
                }
            }
        };
        let lazy_length = candidate.length(state.lazy_weights());

        if state.is_fully_evaluated(candidate.edges()) {
            trace.records.push(IterationRecord {
                iteration,
                candidate: candidate.edges().to_vec(),
                candidate_lazy_length: lazy_length,
                selected: Vec::new(),
                outcomes: Vec::new(),
            });
            if lazy_length == INF {
                return Ok((SearchResult::no_path(), trace));
            }
            trace.final_path = Some(candidate.clone());
            return Ok((SearchResult::found(candidate, lazy_length), trace));
        }

        if options.max_iterations.is_some_and(|cap| iteration > cap) {
            return Err(Error::IterationLimit(iteration - 1));
        }

        let clock = Instant::now();
        let ctx = SelectorContext { graph, query, candidate: &candidate, state: &state, iteration };
        let selected = selector.select(&ctx)?;
        trace.selector_time += clock.elapsed();
        if !selected.iter().any(|&e| candidate.edges().contains(&e) && !state.is_evaluated(e)) {
            return Err(Error::SelectorStalled { iteration });
        }

        let mut outcomes = Vec::new();
        let mut no_heavier = true;
        for &e in &selected {
            graph.check_edge(e)?;
            if state.is_evaluated(e) {
                continue;
            }
            let old = state.lazy_weight(e);
            let w = state.evaluate_edge(oracle, e);
            no_heavier &= w <= old;
            outcomes.push((e, w));
            let clock = Instant::now();
            selector.edge_evaluated(graph, e, old, w)?;
            trace.selector_time += clock.elapsed();
        }
        trace.records.push(IterationRecord {
            iteration,
            candidate: candidate.edges().to_vec(),
            candidate_lazy_length: lazy_length,
            selected,
            outcomes,
        });
        iteration += 1;

        // Once fully evaluated the candidate still gets one confirming search.
        if options.immediate_expansion && no_heavier && !state.is_fully_evaluated(candidate.edges()) {
            reuse = Some(candidate);
        }
    }
}

/// The next candidate path. With early return off and no finite path left,
/// infinite weights are replaced by a value exceeding every finite path, so
/// the candidate is a path with the fewest infinite edges.
fn candidate_search(
    workspace: &mut SearchWorkspace,
    graph: &Graph,
    query: Query,
    state: &LazyWeightState,
    options: EngineOptions,
) -> Option<Path> {
    let found = workspace.shortest_path(graph, query, state.lazy_weights());
    if found.path.is_some() || options.infinite_early_return {
        return found.path;
    }
    let lazy = state.lazy_weights();
    let big = 1.0 + lazy.iter().filter(|w| w.is_finite()).sum::<f64>();
    let capped: Vec<Weight> = lazy.iter().map(|&w| if w == INF { big } else { w }).collect();
    workspace.shortest_path(graph, query, &capped).path
}

/// True iff the returned path's true length is within `epsilon` times the
/// optimal length (infinities compare as usual).
pub fn verify_suboptimality(result: &SearchResult, oracle: &WeightOracle, epsilon: f64, optimal_length: Weight) -> bool {
    let returned = match &result.path {
        Some(path) => path.edges().iter().map(|&e| oracle.peek(e)).sum(),
        None => INF,
    };
    returned <= epsilon * optimal_length
}
