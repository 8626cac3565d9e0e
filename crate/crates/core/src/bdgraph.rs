//! Bidirected graphs and the auxiliary graph `H` built from a geodesic structure.
//!
//! Every edge end carries a direction: the edge either leaves or enters the
//! node there. An arc leaves one end and enters the other; other edges leave
//! or enter both ends. A walk passing through a node must arrive and depart
//! through ends of opposite directions.

use num_traits::{Signed, Zero};

use crate::geodesic::{CarrierEdge, GeodesicStructure, NodeClass};
use crate::model::{EdgeId, Instance, NodeId};
use crate::rational::{int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dir {
    Leave,
    Enter,
}

impl Dir {
    pub fn flipped(self) -> Dir {
        match self {
            Dir::Leave => Dir::Enter,
            Dir::Enter => Dir::Leave,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRole {
    Source,
    /// Extra source used when locked edges are lower-bounded.
    Root,
    /// First copy `v¹` of a noncentral carrier node.
    Entry(NodeId),
    /// Second copy `v²`.
    Exit(NodeId),
    Hub {
        w: NodeId,
        copy: usize,
    },
    /// `θ_{w,s}` for the `k`-th terminal.
    Port {
        w: NodeId,
        k: usize,
    },
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeRole {
    /// `e_v = v¹ → v²`.
    NodeEdge(NodeId),
    /// Carrier edge of `G` between two nodes of one zone, or from a zone into a port.
    Radial(EdgeId),
    /// Carrier edge of `G` between two zones; leaves both ends.
    Crossing(EdgeId),
    Leg {
        w: NodeId,
        copy: usize,
        k: usize,
    },
    HubLoop {
        w: NodeId,
        copy: usize,
    },
    SourceArc(usize),
    /// Loop entering the source twice, added with the root.
    SourceLoop,
    /// Replacement of a locked `e_v` leaving both `v¹` and the root.
    LockedEntry(NodeId),
    /// Replacement of a locked `e_v` from the root into `v²`.
    LockedExit(NodeId),
    /// Replacement of a locked hub loop, leaving both the root and the hub.
    RootEdge {
        w: NodeId,
        copy: usize,
    },
    Plain,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BdEdge {
    pub ends: [(usize, Dir); 2],
    pub cap: u64,
    pub role: EdgeRole,
}

impl BdEdge {
    pub fn is_loop(&self) -> bool {
        self.ends[0].0 == self.ends[1].0
    }

    /// The far end when the edge is entered at slot `slot`.
    pub fn other(&self, slot: usize) -> (usize, Dir) {
        self.ends[1 - slot]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BdGraph {
    pub roles: Vec<NodeRole>,
    pub edges: Vec<BdEdge>,
    pub source: usize,
}

impl BdGraph {
    pub fn new() -> Self {
        BdGraph { roles: Vec::new(), edges: Vec::new(), source: 0 }
    }

    pub fn add_node(&mut self, role: NodeRole) -> usize {
        self.roles.push(role);
        self.roles.len() - 1
    }

    pub fn add_edge(&mut self, a: (usize, Dir), b: (usize, Dir), cap: u64, role: EdgeRole) -> EdgeId {
        assert!(!(a.0 == b.0 && a.1 != b.1), "a loop may not both enter and leave its node");
        self.edges.push(BdEdge { ends: [a, b], cap, role });
        self.edges.len() - 1
    }

    pub fn arc(&mut self, from: usize, to: usize, cap: u64, role: EdgeRole) -> EdgeId {
        self.add_edge((from, Dir::Leave), (to, Dir::Enter), cap, role)
    }

    pub fn num_nodes(&self) -> usize {
        self.roles.len()
    }

    /// `(edge, slot)` for each end at each node; loops appear twice.
    pub fn incidence(&self) -> Vec<Vec<(EdgeId, usize)>> {
        let mut inc = vec![Vec::new(); self.num_nodes()];
        for (e, edge) in self.edges.iter().enumerate() {
            for slot in 0..2 {
                inc[edge.ends[slot].0].push((e, slot));
            }
        }
        inc
    }

    pub fn total_cap(&self) -> u64 {
        self.edges.iter().map(|e| e.cap).sum()
    }
}

impl Default for BdGraph {
    fn default() -> Self {
        Self::new()
    }
}

/// Out minus in at `v`; a loop counts twice.
pub fn divergence(g: &BdGraph, f: &[Rational], v: usize) -> Rational {
    let mut d = Rational::zero();
    for (e, edge) in g.edges.iter().enumerate() {
        for &(x, dir) in &edge.ends {
            if x == v {
                match dir {
                    Dir::Leave => d += &f[e],
                    Dir::Enter => d -= &f[e],
                }
            }
        }
    }
    d
}

pub fn flow_value(g: &BdGraph, f: &[Rational]) -> Rational {
    divergence(g, f, g.source)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FlowError {
    #[error("edge {0} has flow outside [0, capacity]")]
    Capacity(EdgeId),
    #[error("flow is not conserved at node {0}")]
    Conservation(usize),
    #[error("flow has {0} entries for {1} edges")]
    Length(usize, usize),
}

/// Capacity bounds and conservation everywhere except the source.
pub fn check_flow(g: &BdGraph, f: &[Rational]) -> Result<(), FlowError> {
    if f.len() != g.edges.len() {
        return Err(FlowError::Length(f.len(), g.edges.len()));
    }
    for (e, edge) in g.edges.iter().enumerate() {
        if f[e].is_negative() || f[e] > int(edge.cap as i64) {
            return Err(FlowError::Capacity(e));
        }
    }
    let mut div = vec![Rational::zero(); g.num_nodes()];
    for (e, edge) in g.edges.iter().enumerate() {
        for &(x, dir) in &edge.ends {
            match dir {
                Dir::Leave => div[x] += &f[e],
                Dir::Enter => div[x] -= &f[e],
            }
        }
    }
    match (0..g.num_nodes()).find(|&v| v != g.source && !div[v].is_zero()) {
        Some(v) => Err(FlowError::Conservation(v)),
        None => Ok(()),
    }
}

/// Reverses the direction of every end at a node of `set`.
pub fn flip(g: &BdGraph, set: &[usize]) -> Result<BdGraph, FlipError> {
    if set.contains(&g.source) {
        return Err(FlipError::Source);
    }
    let mut inset = vec![false; g.num_nodes()];
    for &v in set {
        inset[v] = true;
    }
    let mut out = g.clone();
    for edge in out.edges.iter_mut() {
        for end in edge.ends.iter_mut() {
            if inset[end.0] {
                end.1 = end.1.flipped();
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FlipError {
    #[error("the source cannot be flipped")]
    Source,
}

/// A walk given by its nodes and the edges between them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BdWalk {
    pub nodes: Vec<usize>,
    pub edges: Vec<EdgeId>,
}

impl BdWalk {
    /// Whether consecutive edges alternate directions at every inner node.
    pub fn is_valid(&self, g: &BdGraph) -> bool {
        if self.nodes.len() != self.edges.len() + 1 {
            return false;
        }
        let mut arrive: Option<Dir> = None;
        for (i, &e) in self.edges.iter().enumerate() {
            let edge = &g.edges[e];
            let (x, y) = (self.nodes[i], self.nodes[i + 1]);
            let slot = if edge.ends[0].0 == x && edge.ends[1].0 == y {
                0
            } else if edge.ends[1].0 == x && edge.ends[0].0 == y {
                1
            } else {
                return false;
            };
            let depart = edge.ends[slot].1;
            if arrive.is_some_and(|a| a == depart) {
                return false;
            }
            arrive = Some(edge.ends[1 - slot].1);
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HForm {
    Compact,
    Expensive,
}

/// `H` together with the correspondence to `G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxGraph {
    pub graph: BdGraph,
    pub form: HForm,
    pub terminals: Vec<NodeId>,
    pub entry: Vec<Option<usize>>,
    pub exit: Vec<Option<usize>>,
    pub node_edge: Vec<Option<EdgeId>>,
    /// H-edge of each carrier edge of `G`.
    pub carrier_edge: Vec<Option<EdgeId>>,
    /// Per central node: hub copies, loops and `legs[copy][k]`.
    pub hubs: Vec<Vec<usize>>,
    pub hub_loops: Vec<Vec<EdgeId>>,
    pub legs: Vec<Vec<Vec<EdgeId>>>,
    pub ports: Vec<Vec<usize>>,
    pub source_arcs: Vec<EdgeId>,
    pub c_inf: u64,
}

impl AuxGraph {
    /// Hub nodes with their loop and legs.
    pub fn gadgets(&self) -> impl Iterator<Item = (usize, EdgeId, &[EdgeId])> + '_ {
        self.hubs.iter().enumerate().flat_map(move |(w, copies)| {
            copies.iter().enumerate().map(move |(i, &h)| (h, self.hub_loops[w][i], self.legs[w][i].as_slice()))
        })
    }
}

/// `2·Σc + 2`, exceeding any flow value.
pub fn infinite_capacity(caps: &[u64]) -> u64 {
    2 * caps.iter().sum::<u64>() + 2
}

/// Builds `H` for the carrier graph; `caps` are the node capacities of `G`.
pub fn build_h(inst: &Instance, gs: &GeodesicStructure, caps: &[u64], form: HForm) -> AuxGraph {
    let n = inst.num_nodes();
    let c_inf = infinite_capacity(caps);
    let mut g = BdGraph::new();
    g.source = g.add_node(NodeRole::Source);
    let mut entry = vec![None; n];
    let mut exit = vec![None; n];
    let mut node_edge = vec![None; n];
    for v in 0..n {
        if let NodeClass::Zone(_) = gs.class[v] {
            let a = g.add_node(NodeRole::Entry(v));
            let b = g.add_node(NodeRole::Exit(v));
            entry[v] = Some(a);
            exit[v] = Some(b);
            node_edge[v] = Some(g.arc(a, b, caps[v], EdgeRole::NodeEdge(v)));
        }
    }
    let k = gs.terminals.len();
    let mut hubs = vec![Vec::new(); n];
    let mut hub_loops = vec![Vec::new(); n];
    let mut legs = vec![Vec::new(); n];
    let mut ports = vec![Vec::new(); n];
    for &w in &gs.central {
        ports[w] = (0..k).map(|k| g.add_node(NodeRole::Port { w, k })).collect();
        let (copies, cap) = match form {
            HForm::Compact => (1, caps[w]),
            HForm::Expensive => (caps[w] as usize, 1),
        };
        for copy in 0..copies {
            let h = g.add_node(NodeRole::Hub { w, copy });
            hubs[w].push(h);
            hub_loops[w].push(g.add_edge((h, Dir::Leave), (h, Dir::Leave), cap, EdgeRole::HubLoop { w, copy }));
            let l = (0..k).map(|kk| g.arc(ports[w][kk], h, cap, EdgeRole::Leg { w, copy, k: kk })).collect();
            legs[w].push(l);
        }
    }
    let mut carrier_edge = vec![None; inst.edges().len()];
    for &(e, kind) in &gs.carrier {
        let id = match kind {
            CarrierEdge::Crossing => {
                let (u, v) = inst.edges()[e];
                g.add_edge((exit[u].unwrap(), Dir::Leave), (exit[v].unwrap(), Dir::Leave), c_inf, EdgeRole::Crossing(e))
            }
            CarrierEdge::Radial { from, to } => {
                let head = match gs.class[to] {
                    NodeClass::Central => ports[to][gs.zone(from).unwrap()],
                    _ => entry[to].unwrap(),
                };
                g.arc(exit[from].unwrap(), head, c_inf, EdgeRole::Radial(e))
            }
        };
        carrier_edge[e] = Some(id);
    }
    let source_arcs = gs
        .terminals
        .iter()
        .enumerate()
        .map(|(kk, &s)| g.arc(g.source, entry[s].unwrap(), c_inf, EdgeRole::SourceArc(kk)))
        .collect();
    AuxGraph {
        graph: g,
        form,
        terminals: gs.terminals.clone(),
        entry,
        exit,
        node_edge,
        carrier_edge,
        hubs,
        hub_loops,
        legs,
        ports,
        source_arcs,
        c_inf,
    }
}

pub fn build_compact_h(inst: &Instance, gs: &GeodesicStructure, caps: &[u64]) -> AuxGraph {
    build_h(inst, gs, caps, HForm::Compact)
}

pub fn build_expensive_h(inst: &Instance, gs: &GeodesicStructure, caps: &[u64]) -> AuxGraph {
    build_h(inst, gs, caps, HForm::Expensive)
}

/// `e_v` and hub loops of nodes with positive length.
pub fn locked_edges(aux: &AuxGraph, l: &[Rational]) -> Vec<EdgeId> {
    let mut out: Vec<EdgeId> = Vec::new();
    for (v, e) in aux.node_edge.iter().enumerate() {
        if let Some(e) = e {
            if l[v].is_positive() {
                out.push(*e);
            }
        }
    }
    for (w, loops) in aux.hub_loops.iter().enumerate() {
        if l[w].is_positive() {
            out.extend(loops);
        }
    }
    out.sort_unstable();
    out
}

/// `H` with locked edges replaced by root edges, plus the map back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerBoundReduction {
    pub graph: BdGraph,
    /// For each edge of `H`: its copy in the reduced graph, if it was kept.
    pub kept: Vec<Option<EdgeId>>,
    pub locked: Vec<EdgeId>,
    /// Value a flow must reach to saturate every locked edge.
    pub target: u64,
}

pub fn eliminate_lower_bounds(h: &BdGraph, locked: &[EdgeId]) -> LowerBoundReduction {
    let mut g = BdGraph { roles: h.roles.clone(), edges: Vec::new(), source: 0 };
    let z = g.add_node(NodeRole::Root);
    g.source = z;
    let mut is_locked = vec![false; h.edges.len()];
    for &e in locked {
        is_locked[e] = true;
    }
    let mut kept = vec![None; h.edges.len()];
    let mut target = 0;
    for (e, edge) in h.edges.iter().enumerate() {
        if !is_locked[e] {
            kept[e] = Some(g.add_edge(edge.ends[0], edge.ends[1], edge.cap, edge.role));
            continue;
        }
        target += 2 * edge.cap;
        match edge.role {
            EdgeRole::HubLoop { w, copy } => {
                g.add_edge((z, Dir::Leave), (edge.ends[0].0, Dir::Leave), 2 * edge.cap, EdgeRole::RootEdge { w, copy });
            }
            EdgeRole::NodeEdge(v) => {
                let (a, b) = (edge.ends[0].0, edge.ends[1].0);
                g.add_edge((a, Dir::Leave), (z, Dir::Leave), edge.cap, EdgeRole::LockedEntry(v));
                g.arc(z, b, edge.cap, EdgeRole::LockedExit(v));
            }
            other => panic!("edge role {other:?} cannot be locked"),
        }
    }
    let sink_loop_cap = infinite_capacity(&h.edges.iter().map(|e| e.cap).collect::<Vec<_>>());
    g.add_edge((h.source, Dir::Enter), (h.source, Dir::Enter), sink_loop_cap, EdgeRole::SourceLoop);
    LowerBoundReduction { graph: g, kept, locked: locked.to_vec(), target }
}

/// Flow of `H` from a saturating flow of the reduced graph.
pub fn lift_reduced_flow(h: &BdGraph, red: &LowerBoundReduction, g: &[Rational]) -> Vec<Rational> {
    h.edges
        .iter()
        .enumerate()
        .map(|(e, edge)| match red.kept[e] {
            Some(k) => g[k].clone(),
            None => int(edge.cap as i64),
        })
        .collect()
}

/// Legs sum to twice the loop and no leg exceeds the loop, at every hub.
pub fn is_good(aux: &AuxGraph, f: &[Rational]) -> bool {
    aux.gadgets().all(|(_, lp, legs)| {
        let total = legs.iter().fold(Rational::zero(), |acc, &e| acc + &f[e]);
        total == &f[lp] * int(2) && legs.iter().all(|&e| f[e] <= f[lp])
    })
}

/// The sequence of `G` nodes whose node edge or hub loop the walk traverses.
pub fn path_image(aux: &AuxGraph, walk: &BdWalk) -> Vec<NodeId> {
    walk.edges
        .iter()
        .filter_map(|&e| match aux.graph.edges[e].role {
            EdgeRole::NodeEdge(v) => Some(v),
            EdgeRole::HubLoop { w, .. } => Some(w),
            _ => None,
        })
        .collect()
}

/// The closed source walk of `H` whose image is the geodesic `nodes`.
pub fn path_lift(inst: &Instance, aux: &AuxGraph, gs: &GeodesicStructure, nodes: &[NodeId]) -> Option<BdWalk> {
    let g = &aux.graph;
    let mut w = BdWalk { nodes: vec![g.source], edges: Vec::new() };
    let push = |w: &mut BdWalk, e: EdgeId| {
        let edge = &g.edges[e];
        let last = *w.nodes.last().unwrap();
        let next = if edge.ends[0].0 == last { edge.ends[1].0 } else { edge.ends[0].0 };
        w.edges.push(e);
        w.nodes.push(next);
    };
    let k0 = gs.terminal_index(nodes[0])?;
    push(&mut w, aux.source_arcs[k0]);
    let mut i = 0;
    while i < nodes.len() {
        let v = nodes[i];
        match gs.class[v] {
            NodeClass::Zone(_) => push(&mut w, aux.node_edge[v]?),
            NodeClass::Central => {
                let (a, b) = (gs.zone(nodes[i - 1])?, gs.zone(*nodes.get(i + 1)?)?);
                push(&mut w, aux.legs[v][0][a]);
                push(&mut w, aux.hub_loops[v][0]);
                push(&mut w, aux.legs[v][0][b]);
            }
            NodeClass::Outside => return None,
        }
        if let Some(&u) = nodes.get(i + 1) {
            let e = inst.edge_between(v, u)?;
            push(&mut w, aux.carrier_edge[e]?);
        }
        i += 1;
    }
    let kt = gs.terminal_index(*nodes.last()?)?;
    push(&mut w, aux.source_arcs[kt]);
    w.is_valid(g).then_some(w)
}
