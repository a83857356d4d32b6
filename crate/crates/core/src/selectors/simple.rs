use crate::error::{Error, Result};
use crate::graph::EdgeId;

use super::{EdgeSelector, SelectorContext, SelectorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SimpleKind {
    Expand,
    Forward,
    Reverse,
    Alternate,
    Bisection,
}

impl SimpleKind {
    pub fn selector_kind(self) -> SelectorKind {
        match self {
            SimpleKind::Expand => SelectorKind::Expand,
            SimpleKind::Forward => SelectorKind::Forward,
            SimpleKind::Reverse => SelectorKind::Reverse,
            SimpleKind::Alternate => SelectorKind::Alternate,
            SimpleKind::Bisection => SelectorKind::Bisection,
        }
    }
}

pub fn select_simple(kind: SimpleKind, ctx: &SelectorContext<'_>) -> Result<Vec<EdgeId>> {
    match kind {
        SimpleKind::Expand => {
            let (position, _) = ctx.first_unevaluated()?;
            let frontier = ctx.candidate.vertices()[position];
            let mut edges: Vec<EdgeId> =
                ctx.graph.out_arcs(frontier).iter().map(|a| a.edge).collect();
            edges.dedup();
            Ok(edges)
        }
        SimpleKind::Forward => Ok(vec![ctx.first_unevaluated()?.1]),
        SimpleKind::Reverse => Ok(vec![ctx.last_unevaluated()?.1]),
        SimpleKind::Alternate => {
            let (_, e) = if ctx.iteration % 2 == 1 {
                ctx.first_unevaluated()?
            } else {
                ctx.last_unevaluated()?
            };
            Ok(vec![e])
        }
        SimpleKind::Bisection => Ok(vec![bisection(ctx)?]),
    }
}

/// The unevaluated edge furthest (in path positions) from the nearest
/// evaluated edge of the candidate. Virtual evaluated edges sit just before
/// the first and just after the last position, so a fresh path is split at
/// its middle. Ties go to the earliest position.
fn bisection(ctx: &SelectorContext<'_>) -> Result<EdgeId> {
    let edges = ctx.candidate.edges();
    let n = edges.len() as isize;
    let evaluated: Vec<isize> = std::iter::once(-1)
        .chain(
            edges
                .iter()
                .enumerate()
                .filter(|(_, &e)| ctx.is_evaluated(e))
                .map(|(i, _)| i as isize),
        )
        .chain(std::iter::once(n))
        .collect();
    let mut best: Option<(EdgeId, isize)> = None;
    for (position, e) in ctx.unevaluated() {
        let p = position as isize;
        let distance = evaluated.iter().map(|&q| (p - q).abs()).min().unwrap_or(isize::MAX);
        if best.is_none_or(|(_, d)| distance > d) {
            best = Some((e, distance));
        }
    }
    best.map(|(e, _)| e).ok_or(Error::FullyEvaluated)
}

/// Stateless wrapper exposing one of the simple rules as an [`EdgeSelector`].
#[derive(Debug, Clone, Copy)]
pub struct SimpleSelector(pub SimpleKind);

impl EdgeSelector for SimpleSelector {
    fn kind(&self) -> SelectorKind {
        self.0.selector_kind()
    }

    fn select(&mut self, ctx: &SelectorContext<'_>) -> Result<Vec<EdgeId>> {
        select_simple(self.0, ctx)
    }
}
