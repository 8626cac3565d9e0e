//! Splitting a good flow on `H` into weighted closed source walks.
//!
//! Hub loops are emptied first: at a hub with positive loop flow, two legs
//! `s < t` are chosen so that no third leg carries as much as the loop, and
//! positive walks are traced from both legs down to the source. The weight
//! is capped so the remaining flow stays good. What is left has no flow
//! through any hub and splits like an ordinary acyclic flow.

use num_traits::{Signed, Zero};

use crate::bdgraph::{check_flow, is_good, path_image, AuxGraph, BdGraph, BdWalk, Dir, FlowError};
use crate::model::{EdgeId, FlowPath, Multiflow};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub walks: Vec<(BdWalk, Rational)>,
    /// Images of the walks in `G` with the same weights.
    pub multiflow: Multiflow,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecomposeError {
    #[error("flow is not good")]
    NotGood,
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("walk tracing stuck at node {0}")]
    Stuck(usize),
    #[error("flow left on edge {0} after decomposition")]
    Leftover(EdgeId),
}

struct Tracer<'a> {
    g: &'a BdGraph,
    inc: Vec<Vec<(EdgeId, usize)>>,
}

impl Tracer<'_> {
    /// Extends `walk`, which has just arrived at its last node through an
    /// end of direction `arrive`, along positive edges until the source.
    fn follow(&self, f: &[Rational], walk: &mut BdWalk, mut arrive: Dir) -> Result<(), DecomposeError> {
        let limit = self.g.edges.len() + 1;
        loop {
            let x = *walk.nodes.last().unwrap();
            if x == self.g.source {
                return Ok(());
            }
            if walk.edges.len() > limit {
                return Err(DecomposeError::Stuck(x));
            }
            let (e, slot) = self.inc[x]
                .iter()
                .copied()
                .find(|&(e, slot)| self.g.edges[e].ends[slot].1 != arrive && f[e].is_positive())
                .ok_or(DecomposeError::Stuck(x))?;
            let (y, d) = self.g.edges[e].other(slot);
            walk.edges.push(e);
            walk.nodes.push(y);
            arrive = d;
        }
    }
}

fn subtract(f: &mut [Rational], walk: &BdWalk, alpha: &Rational) {
    for &e in &walk.edges {
        f[e] -= alpha;
    }
}

fn bottleneck(f: &[Rational], walk: &BdWalk) -> Rational {
    walk.edges.iter().map(|&e| f[e].clone()).min().expect("walk has edges")
}

/// Decomposes a good feasible flow `f` on `H` into closed source walks.
pub fn decompose_good_flow(aux: &AuxGraph, f: &[Rational]) -> Result<Decomposition, DecomposeError> {
    let g = &aux.graph;
    check_flow(g, f)?;
    if !is_good(aux, f) {
        return Err(DecomposeError::NotGood);
    }
    let tr = Tracer { g, inc: g.incidence() };
    let mut f = f.to_vec();
    let mut walks = Vec::new();

    for (hub, lp, legs) in aux.gadgets() {
        while f[lp].is_positive() {
            let dominates = |p: usize, f: &[Rational]| f[legs[p]] == f[lp];
            let k = legs.len();
            let (s, t) = (0..k)
                .flat_map(|s| (s + 1..k).map(move |t| (s, t)))
                .find(|&(s, t)| {
                    f[legs[s]].is_positive()
                        && f[legs[t]].is_positive()
                        && (0..k).all(|p| p == s || p == t || !dominates(p, &f))
                })
                .ok_or(DecomposeError::NotGood)?;
            let trace = |leg: EdgeId| -> Result<BdWalk, DecomposeError> {
                let (port, d) = g.edges[leg].ends[0];
                let mut w = BdWalk { nodes: vec![hub, port], edges: vec![leg] };
                tr.follow(&f, &mut w, d)?;
                Ok(w)
            };
            let (q1, q2) = (trace(legs[s])?, trace(legs[t])?);
            let mut walk = BdWalk {
                nodes: q1.nodes.iter().rev().copied().collect(),
                edges: q1.edges.iter().rev().copied().collect(),
            };
            walk.edges.push(lp);
            walk.edges.extend(&q2.edges);
            walk.nodes.extend(&q2.nodes);
            let other =
                (0..k).filter(|&p| p != s && p != t).map(|p| f[legs[p]].clone()).max().unwrap_or_else(Rational::zero);
            let alpha = bottleneck(&f, &walk).min(&f[lp] - other);
            subtract(&mut f, &walk, &alpha);
            walks.push((walk, alpha));
        }
    }

    loop {
        let start = tr.inc[g.source]
            .iter()
            .copied()
            .find(|&(e, slot)| g.edges[e].ends[slot].1 == Dir::Leave && f[e].is_positive());
        let Some((e, slot)) = start else { break };
        let (y, d) = g.edges[e].other(slot);
        let mut walk = BdWalk { nodes: vec![g.source, y], edges: vec![e] };
        tr.follow(&f, &mut walk, d)?;
        let alpha = bottleneck(&f, &walk);
        subtract(&mut f, &walk, &alpha);
        walks.push((walk, alpha));
    }

    if let Some(e) = (0..f.len()).find(|&e| !f[e].is_zero()) {
        return Err(DecomposeError::Leftover(e));
    }
    let multiflow = Multiflow {
        paths: walks.iter().map(|(w, a)| FlowPath { nodes: path_image(aux, w), weight: a.clone() }).collect(),
    };
    Ok(Decomposition { walks, multiflow })
}

/// Edge loads of the walks, for comparison against the input flow.
pub fn walk_loads(num_edges: usize, walks: &[(BdWalk, Rational)]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); num_edges];
    for (w, a) in walks {
        for &e in &w.edges {
            out[e] += a;
        }
    }
    out
}
