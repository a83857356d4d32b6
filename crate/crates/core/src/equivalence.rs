//! Allowable-next-evaluation sets for LazySP and the baseline searches.
//!
//! Starting from a state in which both algorithms have evaluated the same
//! edges, each side lists every edge set it could evaluate next (or that it
//! could terminate) under some tie-breaking. Edge-equivalent pairs must
//! produce identical sets at every reachable state; [`random_walk`] drives
//! both sides through a shared history and compares them at each step.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::IteratorRandom;
use rand::Rng;

use crate::baselines::{AStarReopen, LwaStar, SteppedSearch};
use crate::error::{Error, Result};
use crate::graph::{Directedness, EdgeId, Graph, LazyWeightState, Query, WeightOracle, INF};
use crate::problem::ProblemInstance;
use crate::search::all_shortest_paths;
use crate::selectors::{select_simple, SelectorContext, SimpleKind};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NextStep {
    Evaluate(BTreeSet<EdgeId>),
    Terminate,
}

impl fmt::Display for NextStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NextStep::Evaluate(edges) => write!(f, "evaluate {edges:?}"),
            NextStep::Terminate => f.write_str("terminate"),
        }
    }
}

/// The algorithm pairs proven edge-equivalent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    /// LazySP with the Expand selector and A* with reopening.
    ExpandAStar,
    /// LazySP with the Forward selector and Lazy Weighted A*.
    ForwardLwaStar,
}

impl Pairing {
    pub fn name(self) -> &'static str {
        match self {
            Pairing::ExpandAStar => "expand-astar",
            Pairing::ForwardLwaStar => "forward-lwastar",
        }
    }

    pub fn selector(self) -> SimpleKind {
        match self {
            Pairing::ExpandAStar => SimpleKind::Expand,
            Pairing::ForwardLwaStar => SimpleKind::Forward,
        }
    }
}

impl FromStr for Pairing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "expand-astar" => Ok(Pairing::ExpandAStar),
            "forward-lwastar" => Ok(Pairing::ForwardLwaStar),
            _ => Err(Error::Config(format!("unknown pair `{s}` (expected expand-astar|forward-lwastar)"))),
        }
    }
}

/// Everything LazySP with `kind` may do next given the evaluated edges in
/// `state`: one outcome per minimal lazy-weight candidate path.
pub fn lazysp_allowable(
    graph: &Graph,
    query: Query,
    state: &LazyWeightState,
    kind: SimpleKind,
    iteration: usize,
) -> Result<BTreeSet<NextStep>> {
    let candidates = all_shortest_paths(graph, query, state.lazy_weights())?;
    if candidates.is_empty() {
        return Ok(BTreeSet::from([NextStep::Terminate]));
    }
    let mut steps = BTreeSet::new();
    for candidate in &candidates {
        if state.is_fully_evaluated(candidate.edges()) {
            steps.insert(NextStep::Terminate);
            continue;
        }
        let ctx = SelectorContext { graph, query, candidate, state, iteration };
        let selected = select_simple(kind, &ctx)?;
        steps.insert(NextStep::Evaluate(selected.into_iter().filter(|&e| !state.is_evaluated(e)).collect()));
    }
    Ok(steps)
}

/// Every outcome the baseline `search` can reach through pops that
/// evaluate nothing, with the successor states reaching each. Invariants
/// are checked at every visited state.
pub fn baseline_successors<S: SteppedSearch>(
    search: &S,
    oracle: &WeightOracle,
    limit: usize,
) -> Result<BTreeMap<NextStep, Vec<S>>> {
    let mut out: BTreeMap<NextStep, Vec<S>> = BTreeMap::new();
    let mut seen = HashSet::new();
    seen.insert(search.signature());
    let mut stack = vec![search.clone()];
    while let Some(current) = stack.pop() {
        current.check_invariants(oracle)?;
        let choices = current.choices();
        if choices.is_empty() {
            out.entry(NextStep::Terminate).or_default().push(current);
            continue;
        }
        let before = current.lazy_state().num_evaluated();
        for choice in &choices {
            let mut next = current.clone();
            next.apply(choice, &mut oracle.clone())?;
            let new: BTreeSet<EdgeId> = next.lazy_state().evaluated_edges()[before..].iter().copied().collect();
            if !new.is_empty() {
                out.entry(NextStep::Evaluate(new)).or_default().push(next);
            } else if next.result().is_some() {
                out.entry(NextStep::Terminate).or_default().push(next);
            } else if seen.insert(next.signature()) {
                if seen.len() > limit {
                    return Err(Error::EnumerationLimit(limit));
                }
                stack.push(next);
            }
        }
    }
    Ok(out)
}

/// A state where the two sides disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    /// Evaluated edges, in the order they were evaluated.
    pub evaluated: Vec<EdgeId>,
    pub lazysp: BTreeSet<NextStep>,
    pub baseline: BTreeSet<NextStep>,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |set: &BTreeSet<NextStep>| set.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("; ");
        write!(
            f,
            "after evaluating {:?}: lazysp allows [{}], baseline allows [{}]",
            self.evaluated,
            show(&self.lazysp),
            show(&self.baseline)
        )
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WalkStats {
    pub states_compared: usize,
    pub edges_evaluated: usize,
}

/// Drives LazySP and the paired baseline through one shared random history
/// from scratch, comparing allowable sets at every step.
pub fn random_walk(
    instance: &ProblemInstance,
    query: Query,
    pairing: Pairing,
    rng: &mut impl Rng,
    limit: usize,
) -> Result<std::result::Result<WalkStats, Mismatch>> {
    match pairing {
        Pairing::ExpandAStar => {
            let start = AStarReopen::new(&instance.graph, query, &instance.estimates)?;
            walk(instance, query, pairing.selector(), start, rng, limit)
        }
        Pairing::ForwardLwaStar => {
            let start = LwaStar::new(&instance.graph, query, &instance.estimates)?;
            walk(instance, query, pairing.selector(), start, rng, limit)
        }
    }
}

fn walk<S: SteppedSearch>(
    instance: &ProblemInstance,
    query: Query,
    kind: SimpleKind,
    mut baseline: S,
    rng: &mut impl Rng,
    limit: usize,
) -> Result<std::result::Result<WalkStats, Mismatch>> {
    let graph = &instance.graph;
    let oracle = instance.oracle();
    let mut state = LazyWeightState::new(&instance.estimates);
    let mut stats = WalkStats::default();
    for iteration in 1.. {
        let lazysp = lazysp_allowable(graph, query, &state, kind, iteration)?;
        let mut successors = baseline_successors(&baseline, &oracle, limit)?;
        stats.states_compared += 1;
        let baseline_steps: BTreeSet<NextStep> = successors.keys().cloned().collect();
        if lazysp != baseline_steps {
            return Ok(Err(Mismatch {
                evaluated: state.evaluated_edges().to_vec(),
                lazysp,
                baseline: baseline_steps,
            }));
        }
        let step = lazysp.iter().choose(rng).expect("nonempty allowable set").clone();
        let NextStep::Evaluate(edges) = &step else { break };
        for &e in edges {
            state.record(e, oracle.peek(e));
        }
        stats.edges_evaluated += edges.len();
        let options = successors.remove(&step).expect("matching outcome");
        baseline = options.into_iter().choose(rng).expect("nonempty successor list");
        debug_assert_eq!(
            baseline.lazy_state().evaluated_edges().iter().collect::<BTreeSet<_>>(),
            state.evaluated_edges().iter().collect::<BTreeSet<_>>()
        );
    }
    Ok(Ok(stats))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExploreStats {
    /// Distinct evaluated-edge sets visited.
    pub lazysp_states: usize,
    /// Distinct baseline states compared against them.
    pub baseline_states: usize,
}

/// Visits every evaluated-edge state reachable by either side from scratch
/// and compares allowable sets at each pairing of a LazySP state with a
/// baseline state that has evaluated the same edges. `limit` caps the
/// number of baseline states.
pub fn explore(
    instance: &ProblemInstance,
    query: Query,
    pairing: Pairing,
    limit: usize,
) -> Result<std::result::Result<ExploreStats, Mismatch>> {
    match pairing {
        Pairing::ExpandAStar => {
            let start = AStarReopen::new(&instance.graph, query, &instance.estimates)?;
            explore_from(instance, query, pairing.selector(), start, limit)
        }
        Pairing::ForwardLwaStar => {
            let start = LwaStar::new(&instance.graph, query, &instance.estimates)?;
            explore_from(instance, query, pairing.selector(), start, limit)
        }
    }
}

fn explore_from<S: SteppedSearch>(
    instance: &ProblemInstance,
    query: Query,
    kind: SimpleKind,
    start: S,
    limit: usize,
) -> Result<std::result::Result<ExploreStats, Mismatch>> {
    let graph = &instance.graph;
    let oracle = instance.oracle();
    let mut stats = ExploreStats::default();
    let mut seen_baseline = HashSet::new();
    seen_baseline.insert(start.signature());
    // Keyed by evaluated set; holds one evaluation history and the pending
    // baseline states for that set.
    let mut pending: BTreeMap<BTreeSet<EdgeId>, (Vec<EdgeId>, Vec<S>)> = BTreeMap::new();
    let mut allowable: BTreeMap<BTreeSet<EdgeId>, BTreeSet<NextStep>> = BTreeMap::new();
    pending.insert(BTreeSet::new(), (Vec::new(), vec![start]));
    while let Some((evaluated, (history, searches))) = pending.pop_first() {
        let lazysp = match allowable.get(&evaluated) {
            Some(steps) => steps.clone(),
            None => {
                let mut state = LazyWeightState::new(&instance.estimates);
                for &e in &history {
                    state.record(e, oracle.peek(e));
                }
                // Forward and Expand ignore the iteration number.
                let steps = lazysp_allowable(graph, query, &state, kind, history.len() + 1)?;
                stats.lazysp_states += 1;
                allowable.insert(evaluated.clone(), steps.clone());
                steps
            }
        };
        for search in searches {
            stats.baseline_states += 1;
            let successors = baseline_successors(&search, &oracle, limit)?;
            let baseline: BTreeSet<NextStep> = successors.keys().cloned().collect();
            if baseline != lazysp {
                return Ok(Err(Mismatch { evaluated: history, lazysp, baseline }));
            }
            for (step, nexts) in successors {
                let NextStep::Evaluate(edges) = step else { continue };
                for next in nexts {
                    if !seen_baseline.insert(next.signature()) {
                        continue;
                    }
                    if seen_baseline.len() > limit {
                        return Err(Error::EnumerationLimit(limit));
                    }
                    let key: BTreeSet<EdgeId> = evaluated.union(&edges).copied().collect();
                    let entry = pending.entry(key).or_insert_with(|| {
                        let mut h = history.clone();
                        h.extend(edges.iter().copied());
                        (h, Vec::new())
                    });
                    entry.1.push(next);
                }
            }
        }
    }
    Ok(Ok(stats))
}

/// How [`random_small_instance`] draws finite weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightStyle {
    /// Integers 1..=4: exact ties between distinct paths are common.
    Integer,
    /// Multiples of 2^-20 in [1, 4]: sums stay exact in `f64` while ties
    /// between distinct paths are vanishingly rare.
    Dyadic,
}

/// A small random instance: true weights finite or infinite (probability
/// 0.3), admissible estimates no larger than the finite true weight.
pub fn random_small_instance(
    rng: &mut impl Rng,
    max_vertices: usize,
    directedness: Directedness,
    style: WeightStyle,
) -> ProblemInstance {
    let n = rng.gen_range(2..=max_vertices.max(2));
    let density = match directedness {
        Directedness::Directed => 0.3,
        Directedness::Undirected => 0.35,
    };
    let mut endpoints = Vec::new();
    for u in 0..n {
        for v in 0..n {
            let wanted = match directedness {
                Directedness::Directed => u != v,
                Directedness::Undirected => u < v,
            };
            if wanted && rng.gen::<f64>() < density {
                endpoints.push((u, v));
            }
        }
    }
    let (unit, max_units) = match style {
        WeightStyle::Integer => (1.0, 4u64),
        WeightStyle::Dyadic => (f64::powi(2.0, -20), 4 << 20),
    };
    let min_units = max_units / 4;
    let mut estimates = Vec::with_capacity(endpoints.len());
    let mut true_weights = Vec::with_capacity(endpoints.len());
    for _ in &endpoints {
        let infinite = rng.gen::<f64>() < 0.3;
        let w = rng.gen_range(min_units..=max_units);
        let est = rng.gen_range(min_units..=w);
        true_weights.push(if infinite { INF } else { w as f64 * unit });
        estimates.push(if infinite { w as f64 * unit } else { est as f64 * unit });
    }
    let start = rng.gen_range(0..n);
    let goal = (start + rng.gen_range(1..n)) % n;
    let graph = Graph::new(n, directedness, endpoints).expect("valid random graph");
    ProblemInstance::new(graph, Some(Query { start, goal }), estimates, true_weights).expect("valid weights")
}
