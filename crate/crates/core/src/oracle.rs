//! Exhaustive reference computations for small inputs.

use std::collections::HashMap;

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::bdgraph::{BdGraph, Dir, EdgeRole, NodeRole};
use crate::geodesic::lengths;
use crate::lp::{solve_lp, LpProblem, LpStatus, Relation, Sense, VarBound};
use crate::model::{load_function, path_cost, FlowPath, Instance, Multiflow, Node, NodeId};
use crate::rational::{int, Rational};
use crate::skflow::SkGraph;

/// Largest node count accepted by the exhaustive routines.
pub const MAX_NODES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("instance has {0} nodes, more than the oracle bound")]
    TooLarge(usize),
    #[error("path LP failed: {0}")]
    Lp(String),
}

/// All T-paths, each listed once with its smaller terminal first.
pub fn enumerate_t_paths(inst: &Instance) -> Result<Vec<Vec<NodeId>>, OracleError> {
    let n = inst.num_nodes();
    if n > MAX_NODES {
        return Err(OracleError::TooLarge(n));
    }
    let mut out = Vec::new();
    let mut on = vec![false; n];
    for s in inst.terminals() {
        let mut path = vec![s];
        on[s] = true;
        extend(inst, &mut path, &mut on, &mut out);
        on[s] = false;
    }
    Ok(out)
}

fn extend(inst: &Instance, path: &mut Vec<NodeId>, on: &mut [bool], out: &mut Vec<Vec<NodeId>>) {
    let last = *path.last().unwrap();
    for &(v, _) in inst.neighbors(last) {
        if on[v] {
            continue;
        }
        if inst.is_terminal(v) {
            if path[0] < v {
                let mut p = path.clone();
                p.push(v);
                out.push(p);
            }
            continue;
        }
        on[v] = true;
        path.push(v);
        extend(inst, path, on, out);
        path.pop();
        on[v] = false;
    }
}

/// Optimal multiflow and `Φ*` from the LP over all T-paths.
pub fn brute_force_primal(inst: &Instance, lambda: &Rational) -> Result<(Multiflow, Rational), OracleError> {
    let paths = enumerate_t_paths(inst)?;
    let costs: Vec<Rational> = inst.nodes().iter().map(|x| int(x.cost as i64)).collect();
    let mut lp = LpProblem::new(Sense::Maximize);
    for p in &paths {
        lp.add_var(VarBound::NonNegative, lambda - path_cost(&costs, p));
    }
    for v in 0..inst.num_nodes() {
        let coeffs: Vec<(usize, Rational)> =
            paths.iter().enumerate().filter(|(_, p)| p.contains(&v)).map(|(j, _)| (j, int(1))).collect();
        if !coeffs.is_empty() {
            lp.add_constraint(coeffs, Relation::Le, int(inst.cap(v) as i64));
        }
    }
    let r = solve_lp(&lp).map_err(|e| OracleError::Lp(e.to_string()))?;
    if r.status != LpStatus::Optimal {
        return Err(OracleError::Lp(format!("{:?}", r.status)));
    }
    let flow = Multiflow {
        paths: paths
            .into_iter()
            .zip(r.primal)
            .filter(|(_, x)| x.is_positive())
            .map(|(nodes, weight)| FlowPath { nodes, weight })
            .collect(),
    };
    Ok((flow, r.objective))
}

/// Checks feasibility of both sides and the slackness conditions: every
/// flow path has length exactly `λ`, every node of positive length is saturated.
pub fn check_complementary_slackness(
    inst: &Instance,
    f: &Multiflow,
    l: &[Rational],
    lambda: &Rational,
) -> Result<(), String> {
    if !crate::model::is_feasible(inst, f) {
        return Err("multiflow is infeasible".into());
    }
    let net = crate::dual::Network::from_instance(inst);
    if !crate::dual::check_dual_feasible(&net, l, lambda) {
        return Err("lengths are not dual feasible".into());
    }
    let ell = lengths(inst, l);
    for p in f.paths.iter().filter(|p| p.weight.is_positive()) {
        let len =
            p.nodes.windows(2).fold(Rational::zero(), |acc, w| acc + &ell[inst.edge_between(w[0], w[1]).unwrap()]);
        if len != *lambda {
            return Err(format!("path {:?} has length {len}, not λ", p.nodes));
        }
    }
    let load = load_function(inst, f);
    for (v, x) in l.iter().enumerate() {
        if x.is_positive() && load.node[v] != int(inst.cap(v) as i64) {
            return Err(format!("node {} has positive length but is not saturated", inst.node(v).name));
        }
    }
    Ok(())
}

/// Maximum integer flow value by packing closed source walks that leave the
/// source twice. Walks never repeat a (node, arrival direction) state, which
/// loses nothing since a repeated state closes a removable cycle.
pub fn brute_force_max_ibd(g: &BdGraph) -> u64 {
    let inc = g.incidence();
    let mut memo = HashMap::new();
    let caps: Vec<u64> = g.edges.iter().map(|e| e.cap).collect();
    best_packing(g, &inc, caps, &mut memo)
}

fn best_packing(g: &BdGraph, inc: &[Vec<(usize, usize)>], rem: Vec<u64>, memo: &mut HashMap<Vec<u64>, u64>) -> u64 {
    if let Some(&v) = memo.get(&rem) {
        return v;
    }
    let mut walks = Vec::new();
    let mut used = vec![0u64; rem.len()];
    let mut seen = vec![[false; 2]; g.num_nodes()];
    let mut stack = Vec::new();
    for &(e, slot) in &inc[g.source] {
        if g.edges[e].ends[slot].1 == Dir::Leave {
            collect_walks(g, inc, &rem, e, slot, &mut used, &mut seen, &mut stack, &mut walks);
        }
    }
    let mut best = 0;
    for w in walks {
        let mut next = rem.clone();
        for &e in &w {
            next[e] -= 1;
        }
        best = best.max(2 + best_packing(g, inc, next, memo));
    }
    memo.insert(rem, best);
    best
}

/// Extends walks that start by leaving the source through `(e, slot)`.
#[allow(clippy::too_many_arguments)]
fn collect_walks(
    g: &BdGraph,
    inc: &[Vec<(usize, usize)>],
    rem: &[u64],
    e: usize,
    slot: usize,
    used: &mut Vec<u64>,
    seen: &mut Vec<[bool; 2]>,
    stack: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if used[e] >= rem[e] {
        return;
    }
    let (x, d) = g.edges[e].other(slot);
    let key = (d == Dir::Enter) as usize;
    if x != g.source && seen[x][key] {
        return;
    }
    used[e] += 1;
    stack.push(e);
    if x == g.source && d == Dir::Leave {
        out.push(stack.clone());
    } else if x != g.source {
        seen[x][key] = true;
        for &(f, s2) in &inc[x] {
            if g.edges[f].ends[s2].1 != d && !(f == e && s2 == 1 - slot) {
                collect_walks(g, inc, rem, f, s2, used, seen, stack, out);
            }
        }
        seen[x][key] = false;
    }
    stack.pop();
    used[e] -= 1;
}

/// Nodes reachable from the source by regular paths, and whether the sink is.
pub fn brute_force_regular_reach(g: &SkGraph) -> Vec<bool> {
    let n = g.num_nodes();
    let mut out_arcs = vec![Vec::new(); n];
    for (a, arc) in g.arcs.iter().enumerate() {
        out_arcs[arc.tail].push(a);
    }
    let mut reach = vec![false; n];
    let mut on = vec![false; n];
    let mut in_path = vec![false; g.arcs.len()];
    reach[g.source] = true;
    on[g.source] = true;
    dfs_regular(g, &out_arcs, g.source, &mut on, &mut in_path, &mut reach);
    reach
}

fn dfs_regular(
    g: &SkGraph,
    out_arcs: &[Vec<usize>],
    x: usize,
    on: &mut [bool],
    in_path: &mut [bool],
    reach: &mut [bool],
) {
    for &a in &out_arcs[x] {
        let h = g.arcs[a].head;
        if on[h] || g.arcs[a].cap == 0 {
            continue;
        }
        if in_path[a ^ 1] && g.arcs[a].cap < 2 {
            continue;
        }
        reach[h] = true;
        on[h] = true;
        in_path[a] = true;
        dfs_regular(g, out_arcs, h, on, in_path, reach);
        in_path[a] = false;
        on[h] = false;
    }
}

/// A random bidirected graph with `n` nodes. Node 0 is the source and its
/// ends lean towards leaving it.
pub fn random_bd_graph<R: Rng>(rng: &mut R, n: usize, m: usize, max_cap: u64) -> BdGraph {
    let mut g = BdGraph::new();
    for _ in 0..n {
        g.add_node(NodeRole::Plain);
    }
    g.source = 0;
    let dir = |rng: &mut R| if rng.gen_bool(0.5) { Dir::Leave } else { Dir::Enter };
    for _ in 0..m {
        let u = rng.gen_range(0..n);
        let v = if rng.gen_bool(0.1) { u } else { rng.gen_range(0..n) };
        let mut du = dir(rng);
        if u == 0 && rng.gen_bool(0.6) {
            du = Dir::Leave;
        }
        let dv = if u == v { du } else { dir(rng) };
        g.add_edge((u, du), (v, dv), rng.gen_range(0..=max_cap), EdgeRole::Plain);
    }
    g
}

/// A random connected instance: a spanning tree plus extra edges, 2 to 4
/// terminals, capacities in `0..=3` and costs in `1..=5`.
pub fn random_instance<R: Rng>(rng: &mut R, n: usize, extra_edge_prob: f64) -> Instance {
    assert!(n >= 2, "need at least two nodes");
    let k = rng.gen_range(2..=n.min(4));
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut is_terminal = vec![false; n];
    for &v in &order[..k] {
        is_terminal[v] = true;
    }
    let nodes = (0..n)
        .map(|v| Node {
            name: format!("v{v}"),
            cap: rng.gen_range(0..=3),
            cost: rng.gen_range(1..=5),
            terminal: is_terminal[v],
        })
        .collect();
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !edges.contains(&(u, v)) && rng.gen_bool(extra_edge_prob) {
                edges.push((u, v));
            }
        }
    }
    edges.sort_unstable();
    Instance::new(nodes, edges, None)
}
