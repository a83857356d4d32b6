//! Monte Carlo edge-indicator probabilities from sampled weight functions.
//!
//! Each sample draws a full weight function from an independent-edge belief
//! model conditioned on the evaluated edges, solves the shortest-path
//! problem on it, and tallies which edges the solution uses.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, LazyWeightState, Query, Weight, INF};
use crate::search::SearchWorkspace;

use super::{argmax_earliest, EdgeSelector, SelectorContext, SelectorKind};

/// Weight of an unevaluated edge when the sample says it is collision-free.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValidWeight {
    /// The edge's estimate (e.g. its Euclidean length).
    Estimate,
    /// Uniform on `[low, high)`.
    Uniform { low: f64, high: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeBeliefModel {
    pub collision_probability: f64,
    pub valid_weight: ValidWeight,
}

impl EdgeBeliefModel {
    pub fn new(collision_probability: f64, valid_weight: ValidWeight) -> Result<Self> {
        if !(0.0..=1.0).contains(&collision_probability) {
            return Err(Error::Config(format!(
                "collision probability {collision_probability} outside [0, 1]"
            )));
        }
        if let ValidWeight::Uniform { low, high } = valid_weight {
            if !(0.0 <= low && low < high) {
                return Err(Error::Config(format!("invalid uniform range [{low}, {high})")));
            }
        }
        Ok(EdgeBeliefModel { collision_probability, valid_weight })
    }

    /// Writes one sampled weight function into `out`. Evaluated edges keep
    /// their known weight.
    pub fn sample_into(&self, state: &LazyWeightState, rng: &mut impl Rng, out: &mut Vec<Weight>) {
        out.clear();
        out.extend_from_slice(state.lazy_weights());
        for (e, w) in out.iter_mut().enumerate() {
            if state.is_evaluated(e) {
                continue;
            }
            *w = if rng.gen::<f64>() < self.collision_probability {
                INF
            } else {
                match self.valid_weight {
                    ValidWeight::Estimate => state.estimate(e),
                    ValidWeight::Uniform { low, high } => rng.gen_range(low..high),
                }
            };
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorEstimate {
    counts: Vec<u32>,
    finite_samples: usize,
    total_samples: usize,
}

impl IndicatorEstimate {
    /// Fraction of finite-path samples whose shortest path uses `e`.
    pub fn probability(&self, e: EdgeId) -> f64 {
        if self.finite_samples == 0 {
            0.0
        } else {
            f64::from(self.counts[e]) / self.finite_samples as f64
        }
    }

    pub fn finite_samples(&self) -> usize {
        self.finite_samples
    }

    pub fn total_samples(&self) -> usize {
        self.total_samples
    }
}

/// The RNG for sample `index` under `seed`: one independent ChaCha stream
/// per sample, so serial and parallel sampling agree.
pub fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

pub fn sample_indicator(
    graph: &Graph,
    query: Query,
    state: &LazyWeightState,
    model: &EdgeBeliefModel,
    n_samples: usize,
    seed: u64,
) -> Result<IndicatorEstimate> {
    let mut sampler = Sampler::default();
    sampler.estimate(graph, query, state, model, n_samples, seed)
}

#[derive(Debug, Default, Clone)]
struct Sampler {
    workspace: SearchWorkspace,
    weights: Vec<Weight>,
}

impl Sampler {
    fn estimate(
        &mut self,
        graph: &Graph,
        query: Query,
        state: &LazyWeightState,
        model: &EdgeBeliefModel,
        n_samples: usize,
        seed: u64,
    ) -> Result<IndicatorEstimate> {
        if n_samples == 0 {
            return Err(Error::Config("WeightSamp needs at least one sample".into()));
        }
        let mut counts = vec![0u32; graph.num_edges()];
        let mut finite_samples = 0;
        for index in 0..n_samples {
            let mut rng = sample_rng(seed, index);
            model.sample_into(state, &mut rng, &mut self.weights);
            let result = self.workspace.shortest_path(graph, query, &self.weights);
            if let Some(path) = result.path {
                finite_samples += 1;
                for &e in path.edges() {
                    counts[e] += 1;
                }
            }
        }
        if finite_samples == 0 {
            return Err(Error::NoFiniteSamples { samples: n_samples });
        }
        Ok(IndicatorEstimate { counts, finite_samples, total_samples: n_samples })
    }
}

/// The unevaluated candidate edge with the largest estimated probability.
pub fn select_weightsamp(ctx: &SelectorContext<'_>, estimate: &IndicatorEstimate) -> Result<Vec<EdgeId>> {
    argmax_earliest(ctx, 0.0, |e| Ok(estimate.probability(e))).map(|e| vec![e])
}

#[derive(Debug, Clone)]
pub struct WeightSampSelector {
    model: EdgeBeliefModel,
    n_samples: usize,
    seed: u64,
    sampler: Sampler,
}

impl WeightSampSelector {
    pub fn new(model: EdgeBeliefModel, n_samples: usize, seed: u64) -> Result<Self> {
        if n_samples == 0 {
            return Err(Error::Config("WeightSamp needs at least one sample".into()));
        }
        Ok(WeightSampSelector { model, n_samples, seed, sampler: Sampler::default() })
    }

    fn iteration_seed(&self, iteration: usize) -> u64 {
        crate::experiments::derive_seed(self.seed, iteration as u64)
    }
}

impl EdgeSelector for WeightSampSelector {
    fn kind(&self) -> SelectorKind {
        SelectorKind::WeightSamp
    }

    fn select(&mut self, ctx: &SelectorContext<'_>) -> Result<Vec<EdgeId>> {
        let seed = self.iteration_seed(ctx.iteration);
        match self.sampler.estimate(ctx.graph, ctx.query, ctx.state, &self.model, self.n_samples, seed) {
            Ok(estimate) => select_weightsamp(ctx, &estimate),
            // Every sample blocked: no information, fall back to the first
            // unevaluated edge (the tie rule over all-zero scores).
            Err(Error::NoFiniteSamples { .. }) => Ok(vec![ctx.first_unevaluated()?.1]),
            Err(e) => Err(e),
        }
    }
}
