//! Shortest paths and the structure of the geodesic subgraph.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_traits::Zero;

use crate::dual::Network;
use crate::model::{EdgeId, Instance, NodeId};
use crate::rational::{half, int, Rational};

/// Dijkstra from `src` for nonnegative edge lengths.
pub fn shortest_paths(n: usize, edges: &[(NodeId, NodeId)], len: &[Rational], src: NodeId) -> Vec<Option<Rational>> {
    let mut adj = vec![Vec::new(); n];
    for (e, &(u, v)) in edges.iter().enumerate() {
        adj[u].push((v, e));
        adj[v].push((u, e));
    }
    let mut dist: Vec<Option<Rational>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    dist[src] = Some(Rational::zero());
    heap.push(Reverse((Rational::zero(), src)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if dist[u].as_ref().is_some_and(|x| *x < d) {
            continue;
        }
        for &(v, e) in &adj[u] {
            let nd = &d + &len[e];
            if dist[v].as_ref().is_none_or(|x| nd < *x) {
                dist[v] = Some(nd.clone());
                heap.push(Reverse((nd, v)));
            }
        }
    }
    dist
}

/// `w̄` on the edges of an instance.
pub fn bar_lengths(inst: &Instance, w: &[Rational]) -> Vec<Rational> {
    Network::from_instance(inst).bar(w)
}

/// `ℓ = ā + l̄`.
pub fn lengths(inst: &Instance, l: &[Rational]) -> Vec<Rational> {
    let w: Vec<Rational> = inst.nodes().iter().zip(l).map(|(n, x)| int(n.cost as i64) + x).collect();
    bar_lengths(inst, &w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    /// Zone of the `k`-th terminal.
    Zone(usize),
    Central,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CarrierEdge {
    /// Inside a zone, or between a zone and a central node; `from` has the smaller potential.
    Radial { from: NodeId, to: NodeId },
    /// Between two different zones.
    Crossing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeodesicStructure {
    pub terminals: Vec<NodeId>,
    pub ell: Vec<Rational>,
    /// `dist[k][v]`: distance from the `k`-th terminal.
    pub dist: Vec<Vec<Option<Rational>>>,
    /// Minimum distance between two distinct terminals.
    pub p: Rational,
    /// Distance to the nearest terminal.
    pub pi: Vec<Option<Rational>>,
    pub class: Vec<NodeClass>,
    pub central: Vec<NodeId>,
    /// Carrier edges with their kind, in edge order.
    pub carrier: Vec<(EdgeId, CarrierEdge)>,
    is_carrier: Vec<Option<CarrierEdge>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeodesicOutcome {
    Structure(GeodesicStructure),
    /// `p > λ`: no T-path is short enough, so the zero flow is optimal.
    ZeroFlow {
        p: Option<Rational>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeodesicError {
    #[error("terminals {0} and {1} are at distance {2} < λ")]
    DualInfeasible(NodeId, NodeId, Rational),
}

pub fn geodesic_structure(
    inst: &Instance,
    l: &[Rational],
    lambda: &Rational,
) -> Result<GeodesicOutcome, GeodesicError> {
    let n = inst.num_nodes();
    let ell = lengths(inst, l);
    let terminals = inst.terminals();
    let dist: Vec<Vec<Option<Rational>>> =
        terminals.iter().map(|&s| shortest_paths(n, inst.edges(), &ell, s)).collect();
    let mut p: Option<Rational> = None;
    for (i, &s) in terminals.iter().enumerate() {
        for &t in &terminals {
            if t == s {
                continue;
            }
            if let Some(d) = &dist[i][t] {
                if d < lambda {
                    return Err(GeodesicError::DualInfeasible(s, t, d.clone()));
                }
                if p.as_ref().is_none_or(|x| d < x) {
                    p = Some(d.clone());
                }
            }
        }
    }
    let p = match p {
        Some(p) if p == *lambda => p,
        other => return Ok(GeodesicOutcome::ZeroFlow { p: other }),
    };
    let pi: Vec<Option<Rational>> = (0..n).map(|v| dist.iter().filter_map(|d| d[v].clone()).min()).collect();
    let half_p = &p * half();
    let class: Vec<NodeClass> = (0..n)
        .map(|v| match &pi[v] {
            Some(x) if *x < half_p => {
                let k =
                    (0..terminals.len()).find(|&k| dist[k][v].as_ref() == Some(x)).expect("nearest terminal exists");
                NodeClass::Zone(k)
            }
            Some(x) if *x == half_p => NodeClass::Central,
            _ => NodeClass::Outside,
        })
        .collect();
    let central = (0..n).filter(|&v| class[v] == NodeClass::Central).collect();
    let mut carrier = Vec::new();
    let mut is_carrier = vec![None; inst.edges().len()];
    for (e, &(u, v)) in inst.edges().iter().enumerate() {
        let kind = match (class[u], class[v]) {
            (NodeClass::Zone(a), NodeClass::Zone(b)) if a != b => {
                let (pu, pv) = (pi[u].as_ref().unwrap(), pi[v].as_ref().unwrap());
                (pu + pv + &ell[e] == p).then_some(CarrierEdge::Crossing)
            }
            (NodeClass::Zone(a), NodeClass::Zone(b)) if a == b => radial(&pi, &ell, u, v, e),
            (NodeClass::Zone(_), NodeClass::Central) | (NodeClass::Central, NodeClass::Zone(_)) => {
                radial(&pi, &ell, u, v, e)
            }
            _ => None,
        };
        if let Some(k) = kind {
            carrier.push((e, k));
            is_carrier[e] = Some(k);
        }
    }
    Ok(GeodesicOutcome::Structure(GeodesicStructure {
        terminals,
        ell,
        dist,
        p,
        pi,
        class,
        central,
        carrier,
        is_carrier,
    }))
}

fn radial(pi: &[Option<Rational>], ell: &[Rational], u: NodeId, v: NodeId, e: EdgeId) -> Option<CarrierEdge> {
    let (pu, pv) = (pi[u].as_ref()?, pi[v].as_ref()?);
    if pu + &ell[e] == *pv {
        Some(CarrierEdge::Radial { from: u, to: v })
    } else if pv + &ell[e] == *pu {
        Some(CarrierEdge::Radial { from: v, to: u })
    } else {
        None
    }
}

impl GeodesicStructure {
    pub fn carrier_kind(&self, e: EdgeId) -> Option<CarrierEdge> {
        self.is_carrier[e]
    }

    pub fn zone(&self, v: NodeId) -> Option<usize> {
        match self.class[v] {
            NodeClass::Zone(k) => Some(k),
            _ => None,
        }
    }

    pub fn terminal_index(&self, s: NodeId) -> Option<usize> {
        self.terminals.iter().position(|&t| t == s)
    }

    pub fn is_carrier_node(&self, v: NodeId) -> bool {
        self.class[v] != NodeClass::Outside
    }

    pub fn path_length(&self, inst: &Instance, nodes: &[NodeId]) -> Option<Rational> {
        nodes.windows(2).try_fold(Rational::zero(), |acc, w| inst.edge_between(w[0], w[1]).map(|e| acc + &self.ell[e]))
    }
}

/// Whether a node path has the shape of an `ℓ`-geodesic: it runs inside the
/// carrier graph, leaves one zone with strictly increasing potential, passes
/// at most one central node or one crossing edge, and enters another zone
/// with strictly decreasing potential.
pub fn is_geodesic(inst: &Instance, gs: &GeodesicStructure, nodes: &[NodeId]) -> bool {
    if crate::model::check_t_path(inst, nodes).is_err() {
        return false;
    }
    let mut edges = Vec::with_capacity(nodes.len());
    for w in nodes.windows(2) {
        match inst.edge_between(w[0], w[1]).and_then(|e| gs.carrier_kind(e)) {
            Some(k) => edges.push(k),
            None => return false,
        }
    }
    let centrals: Vec<usize> = (0..nodes.len()).filter(|&i| gs.class[nodes[i]] == NodeClass::Central).collect();
    let split = match centrals.as_slice() {
        [] => {
            let crossings: Vec<usize> = (0..edges.len()).filter(|&i| edges[i] == CarrierEdge::Crossing).collect();
            match crossings.as_slice() {
                [i] => (*i, *i + 1),
                _ => return false,
            }
        }
        [c] if *c > 0 => (*c - 1, *c + 1),
        _ => return false,
    };
    let (head, tail) = (&nodes[..=split.0], &nodes[split.1..]);
    if head.is_empty() || tail.is_empty() {
        return false;
    }
    let (zs, zt) = (gs.zone(head[0]), gs.zone(*tail.last().unwrap()));
    if zs.is_none() || zs == zt || zt.is_none() {
        return false;
    }
    let rising = |part: &[NodeId], z: Option<usize>| {
        part.iter().all(|&v| gs.zone(v) == z) && part.windows(2).all(|w| gs.pi[w[0]] < gs.pi[w[1]])
    };
    let tail_rev: Vec<NodeId> = tail.iter().rev().copied().collect();
    rising(head, zs) && rising(&tail_rev, zt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::build;
    use crate::rational::frac;

    fn structure(inst: &Instance, l: &[Rational], lambda: i64) -> GeodesicStructure {
        match geodesic_structure(inst, l, &int(lambda)).unwrap() {
            GeodesicOutcome::Structure(g) => g,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn star_center_is_central() {
        let g = build(
            &[("v", 1, 1, false), ("s1", 2, 1, true), ("s2", 2, 1, true), ("s3", 2, 1, true)],
            &[("s1", "v"), ("s2", "v"), ("s3", "v")],
            Some(10),
        );
        let l = vec![int(7), int(0), int(0), int(0)];
        let gs = structure(&g, &l, 10);
        assert_eq!(gs.ell, vec![int(5); 3]);
        assert_eq!(gs.p, int(10));
        assert_eq!(gs.central, vec![0]);
        assert!(is_geodesic(&g, &gs, &[1, 0, 2]));
    }

    /// Three zones around one central node plus a zone-crossing edge.
    pub fn three_zones() -> Instance {
        build(
            &[
                ("p", 1, 1, true),
                ("a", 1, 2, false),
                ("b", 1, 2, false),
                ("s", 1, 1, true),
                ("c", 1, 5, false),
                ("d", 1, 4, false),
                ("r", 1, 1, true),
                ("e", 1, 5, false),
                ("f", 1, 2, false),
                ("g", 1, 2, false),
                ("w", 1, 2, false),
            ],
            &[
                ("p", "a"),
                ("a", "b"),
                ("b", "w"),
                ("s", "c"),
                ("s", "d"),
                ("d", "w"),
                ("r", "e"),
                ("r", "f"),
                ("f", "g"),
                ("g", "w"),
                ("c", "e"),
            ],
            Some(12),
        )
    }

    #[test]
    fn three_zone_layout() {
        let g = three_zones();
        let gs = structure(&g, &vec![int(0); 11], 12);
        let id = |s: &str| g.node_by_name(s).unwrap();
        let zone_names = |k: usize| -> Vec<&str> {
            (0..11).filter(|&v| gs.zone(v) == Some(k)).map(|v| g.node(v).name.as_str()).collect()
        };
        assert_eq!(zone_names(gs.terminal_index(id("p")).unwrap()), ["p", "a", "b"]);
        assert_eq!(zone_names(gs.terminal_index(id("s")).unwrap()), ["s", "c", "d"]);
        assert_eq!(zone_names(gs.terminal_index(id("r")).unwrap()), ["r", "e", "f", "g"]);
        assert_eq!(gs.central, vec![id("w")]);
        let ce = g.edge_between(id("c"), id("e")).unwrap();
        assert_eq!(gs.carrier_kind(ce), Some(CarrierEdge::Crossing));
        assert_eq!(gs.pi[id("c")], Some(frac(7, 2)));
        let path: Vec<NodeId> = ["s", "c", "e", "r"].iter().map(|x| id(x)).collect();
        assert!(is_geodesic(&g, &gs, &path));
        let via_w: Vec<NodeId> = ["p", "a", "b", "w", "g", "f", "r"].iter().map(|x| id(x)).collect();
        assert!(is_geodesic(&g, &gs, &via_w));
        assert_eq!(gs.path_length(&g, &via_w), Some(int(12)));
    }

    #[test]
    fn long_distances_give_zero_flow() {
        let g = build(&[("s", 1, 3, true), ("t", 1, 3, true)], &[("s", "t")], Some(5));
        let out = geodesic_structure(&g, &[int(0), int(0)], &int(5)).unwrap();
        assert_eq!(out, GeodesicOutcome::ZeroFlow { p: Some(int(6)) });
        assert!(geodesic_structure(&g, &[int(0), int(0)], &int(7)).is_err());
    }
}
