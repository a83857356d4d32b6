//! Edge selectors: the rule LazySP uses to pick which edges of the current
//! candidate path to evaluate next.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc as Shared;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, LazyWeightState, Path, Query, Weight};

pub mod partition;
pub mod simple;
pub mod weightsamp;

pub use partition::{partition_edge_prob, PartitionSelector, ZMatrix};
pub use simple::{select_simple, SimpleKind, SimpleSelector};
pub use weightsamp::{
    sample_indicator, select_weightsamp, EdgeBeliefModel, IndicatorEstimate, ValidWeight,
    WeightSampSelector,
};

/// Everything a selector may look at when choosing edges.
#[derive(Debug, Clone, Copy)]
pub struct SelectorContext<'a> {
    pub graph: &'a Graph,
    pub query: Query,
    pub candidate: &'a Path,
    pub state: &'a LazyWeightState,
    /// 1-based LazySP iteration number.
    pub iteration: usize,
}

impl<'a> SelectorContext<'a> {
    pub fn is_evaluated(&self, e: EdgeId) -> bool {
        self.state.is_evaluated(e)
    }

    /// `(position, edge)` for every unevaluated candidate edge, in path order.
    pub fn unevaluated(&self) -> impl Iterator<Item = (usize, EdgeId)> + 'a {
        let state = self.state;
        self.candidate
            .edges()
            .iter()
            .copied()
            .enumerate()
            .filter(move |&(_, e)| !state.is_evaluated(e))
    }

    pub fn first_unevaluated(&self) -> Result<(usize, EdgeId)> {
        self.unevaluated().next().ok_or(Error::FullyEvaluated)
    }

    pub fn last_unevaluated(&self) -> Result<(usize, EdgeId)> {
        self.unevaluated().last().ok_or(Error::FullyEvaluated)
    }
}

/// A pluggable LazySP edge selector.
///
/// The engine calls [`prepare`](EdgeSelector::prepare) once per run, then
/// [`select`](EdgeSelector::select) once per iteration, and reports every
/// new evaluation through [`edge_evaluated`](EdgeSelector::edge_evaluated).
pub trait EdgeSelector {
    fn kind(&self) -> SelectorKind;

    fn prepare(&mut self, _graph: &Graph, _query: Query, _state: &LazyWeightState) -> Result<()> {
        Ok(())
    }

    fn select(&mut self, ctx: &SelectorContext<'_>) -> Result<Vec<EdgeId>>;

    fn edge_evaluated(&mut self, _graph: &Graph, _e: EdgeId, _old: Weight, _new: Weight) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SelectorKind {
    Expand,
    Forward,
    Reverse,
    Alternate,
    Bisection,
    WeightSamp,
    Partition,
}

impl SelectorKind {
    pub const ALL: [SelectorKind; 7] = [
        SelectorKind::Expand,
        SelectorKind::Forward,
        SelectorKind::Reverse,
        SelectorKind::Alternate,
        SelectorKind::Bisection,
        SelectorKind::WeightSamp,
        SelectorKind::Partition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SelectorKind::Expand => "expand",
            SelectorKind::Forward => "forward",
            SelectorKind::Reverse => "reverse",
            SelectorKind::Alternate => "alternate",
            SelectorKind::Bisection => "bisection",
            SelectorKind::WeightSamp => "weightsamp",
            SelectorKind::Partition => "partition",
        }
    }

    /// Single-letter label used in result tables.
    pub fn letter(self) -> char {
        match self {
            SelectorKind::Expand => 'E',
            SelectorKind::Forward => 'F',
            SelectorKind::Reverse => 'R',
            SelectorKind::Alternate => 'A',
            SelectorKind::Bisection => 'B',
            SelectorKind::WeightSamp => 'W',
            SelectorKind::Partition => 'P',
        }
    }

    pub fn as_simple(self) -> Option<SimpleKind> {
        match self {
            SelectorKind::Expand => Some(SimpleKind::Expand),
            SelectorKind::Forward => Some(SimpleKind::Forward),
            SelectorKind::Reverse => Some(SimpleKind::Reverse),
            SelectorKind::Alternate => Some(SimpleKind::Alternate),
            SelectorKind::Bisection => Some(SimpleKind::Bisection),
            SelectorKind::WeightSamp | SelectorKind::Partition => None,
        }
    }
}

impl fmt::Display for SelectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SelectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SelectorKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown selector `{s}` (expected expand|forward|reverse|alternate|bisection|weightsamp|partition)"
                ))
            })
    }
}

/// Knobs for the selectors that need them.
#[derive(Debug, Clone)]
pub struct SelectorSettings {
    /// Required by Partition.
    pub beta: Option<f64>,
    /// Estimate-only partition matrix to start Partition runs from.
    pub precomputed_z: Option<Shared<ZMatrix>>,
    pub belief: EdgeBeliefModel,
    pub ws_samples: usize,
    pub seed: u64,
}

impl Default for SelectorSettings {
    fn default() -> Self {
        SelectorSettings {
            beta: None,
            precomputed_z: None,
            belief: EdgeBeliefModel { collision_probability: 0.1, valid_weight: ValidWeight::Estimate },
            ws_samples: 1000,
            seed: 0,
        }
    }
}

pub fn build_selector(kind: SelectorKind, settings: &SelectorSettings) -> Result<Box<dyn EdgeSelector + Send>> {
    if let Some(simple) = kind.as_simple() {
        return Ok(Box::new(SimpleSelector(simple)));
    }
    match kind {
        SelectorKind::WeightSamp => {
            Ok(Box::new(WeightSampSelector::new(settings.belief, settings.ws_samples, settings.seed)?))
        }
        _ => match (&settings.precomputed_z, settings.beta) {
            (Some(z), Some(beta)) if z.beta() == beta => Ok(Box::new(PartitionSelector::with_precomputed(z.clone())?)),
            (_, Some(beta)) => Ok(Box::new(PartitionSelector::new(beta)?)),
            (_, None) => Err(Error::Config("the partition selector requires --beta".into())),
        },
    }
}

/// Picks the unevaluated candidate edge with the largest score; ties go to
/// the earliest position along the path. Scores within `tie_tolerance` of
/// the best are treated as ties.
pub(crate) fn argmax_earliest(
    ctx: &SelectorContext<'_>,
    tie_tolerance: f64,
    mut score: impl FnMut(EdgeId) -> Result<f64>,
) -> Result<EdgeId> {
    let mut best: Option<(EdgeId, f64)> = None;
    for (_, e) in ctx.unevaluated() {
        let s = score(e)?;
        match best {
            Some((_, b)) if s <= b + tie_tolerance => {}
            _ => best = Some((e, s)),
        }
    }
    best.map(|(e, _)| e).ok_or(Error::FullyEvaluated)
}
