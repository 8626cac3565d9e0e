//! Integer bidirected flows through their skew-symmetric doubles.
//!
//! A bidirected graph on `N` nodes becomes a digraph on `2N` nodes where
//! node `v + N` is the mate `v'` of `v`. Every edge gives a pair of mate
//! arcs, and symmetric flows correspond to bidirected flows. Maximum flows
//! are found by augmenting along regular paths, two units at a time.

mod barrier;
mod regular;

pub use barrier::{barrier_capacity, extract_barrier, verify_barrier, BarrierError, OddBarrier};
pub use regular::{find_regular_path, RegularSearch};

use crate::bdgraph::{BdGraph, Dir, EdgeRole, NodeRole};
use crate::rational::{int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SkArc {
    pub tail: usize,
    pub head: usize,
    pub cap: u64,
}

/// Arcs `2k` and `2k + 1` are mates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkGraph {
    pub half: usize,
    pub arcs: Vec<SkArc>,
    pub source: usize,
}

impl SkGraph {
    pub fn mate(&self, v: usize) -> usize {
        if v < self.half {
            v + self.half
        } else {
            v - self.half
        }
    }

    pub fn num_nodes(&self) -> usize {
        2 * self.half
    }

    pub fn sink(&self) -> usize {
        self.mate(self.source)
    }

    /// Whether the arc set is closed under the mate map.
    pub fn is_skew_symmetric(&self) -> bool {
        self.arcs.chunks(2).all(|p| {
            p.len() == 2
                && p[1].tail == self.mate(p[0].head)
                && p[1].head == self.mate(p[0].tail)
                && p[0].cap == p[1].cap
        })
    }
}

pub fn bd_to_sk(g: &BdGraph) -> SkGraph {
    let n = g.num_nodes();
    let mate = |v: usize| if v < n { v + n } else { v - n };
    let mut arcs = Vec::with_capacity(2 * g.edges.len());
    for e in &g.edges {
        let [(u, du), (v, dv)] = e.ends;
        let tail = if du == Dir::Leave { u } else { mate(u) };
        let head = if dv == Dir::Enter { v } else { mate(v) };
        arcs.push(SkArc { tail, head, cap: e.cap });
        arcs.push(SkArc { tail: mate(head), head: mate(tail), cap: e.cap });
    }
    SkGraph { half: n, arcs, source: g.source }
}

/// Folds mate nodes back together; `first[v]` tells whether `v` (rather
/// than `v'`) is the representative kept with its directions.
pub fn sk_to_bd(sk: &SkGraph, first: &[bool]) -> BdGraph {
    let n = sk.half;
    let side = |x: usize| -> (usize, bool) {
        let v = x % n;
        (v, (x < n) == first[v])
    };
    let mut g = BdGraph::new();
    for _ in 0..n {
        g.add_node(NodeRole::Plain);
    }
    g.source = sk.source % n;
    for p in sk.arcs.chunks(2) {
        let (u, ut) = side(p[0].tail);
        let (v, vh) = side(p[0].head);
        let du = if ut { Dir::Leave } else { Dir::Enter };
        let dv = if vh { Dir::Enter } else { Dir::Leave };
        g.add_edge((u, du), (v, dv), p[0].cap, EdgeRole::Plain);
    }
    g
}

/// Residual graph of a bidirected flow `f` (one value per edge, i.e. per mate pair).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Residual {
    pub graph: SkGraph,
    /// Bidirected edge of each residual pair and whether it runs forward.
    pub origin: Vec<(usize, bool)>,
}

pub fn residual(sk: &SkGraph, f: &[u64]) -> Residual {
    let mut arcs = Vec::new();
    let mut origin = Vec::new();
    for (e, p) in sk.arcs.chunks(2).enumerate() {
        if f[e] < p[0].cap {
            let c = p[0].cap - f[e];
            arcs.push(SkArc { cap: c, ..p[0] });
            arcs.push(SkArc { cap: c, ..p[1] });
            origin.push((e, true));
        }
        if f[e] > 0 {
            arcs.push(SkArc { tail: p[0].head, head: p[0].tail, cap: f[e] });
            arcs.push(SkArc { tail: p[1].head, head: p[1].tail, cap: f[e] });
            origin.push((e, false));
        }
    }
    Residual { graph: SkGraph { half: sk.half, arcs, source: sk.source }, origin }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxFlow {
    /// Flow on each bidirected edge.
    pub flow: Vec<u64>,
    pub value: u64,
    /// Skew-symmetric nodes reachable from the source by regular paths.
    pub reach: Vec<bool>,
    pub augmentations: usize,
}

/// Maximum integer symmetric flow from zero by regular-path augmentation.
/// `seed` randomizes the search order.
pub fn max_isk_flow(sk: &SkGraph, seed: Option<u64>) -> MaxFlow {
    let mut flow = vec![0u64; sk.arcs.len() / 2];
    let mut augmentations = 0;
    loop {
        let res = residual(sk, &flow);
        let search = find_regular_path(&res.graph, seed.map(|s| s.wrapping_add(augmentations as u64)));
        match search.path {
            Some(path) => {
                for a in path {
                    let (e, forward) = res.origin[a / 2];
                    if forward {
                        flow[e] += 1;
                    } else {
                        flow[e] -= 1;
                    }
                }
                augmentations += 1;
            }
            None => {
                let value = sk_value(sk, &flow);
                log::debug!("max flow {value} after {augmentations} augmentations");
                return MaxFlow { flow, value, reach: search.reach, augmentations };
            }
        }
    }
}

/// Net outflow of the source, with each pair counted once.
pub fn sk_value(sk: &SkGraph, flow: &[u64]) -> u64 {
    let s = sk.source;
    let mut out: i64 = 0;
    for (a, arc) in sk.arcs.iter().enumerate().filter(|(a, _)| a % 2 == 0) {
        let x = flow[a / 2] as i64;
        for t in [arc.tail, sk.mate(arc.head)] {
            if t == s {
                out += x;
            }
        }
        for h in [arc.head, sk.mate(arc.tail)] {
            if h == s {
                out -= x;
            }
        }
    }
    out as u64
}

pub fn to_rational(f: &[u64]) -> Vec<Rational> {
    f.iter().map(|&x| int(x as i64)).collect()
}

/// A maximum integer bidirected flow and the canonical odd barrier.
pub fn max_ibd_flow(g: &BdGraph, seed: Option<u64>) -> (MaxFlow, OddBarrier) {
    let sk = bd_to_sk(g);
    let mf = max_isk_flow(&sk, seed);
    let b = extract_barrier(g, &mf.reach);
    (mf, b)
}
