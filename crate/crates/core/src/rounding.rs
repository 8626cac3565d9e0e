//! Rounding an optimal fractional dual to a half-integer one.
//!
//! The graph `Γ` keeps the terminals, everything on geodesics, the edges of
//! `G` among those nodes, and virtual edges standing for detours through the
//! rest of `G`. Pre-lengths and full lengths from each terminal become the
//! variables of a system in which every constraint has at most two
//! variables with coefficients `±1`. Such a system has a half-integer
//! solution, found here by doubling it into difference constraints.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::geodesic::{lengths, shortest_paths};
use crate::lp::Relation;
use crate::model::{Instance, NodeId};
use crate::rational::{big, int, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaEdge {
    pub u: NodeId,
    pub v: NodeId,
    pub mu: u64,
    pub is_virtual: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundingGraph {
    pub terminals: Vec<NodeId>,
    pub in_gamma: Vec<bool>,
    pub edges: Vec<GammaEdge>,
    /// `T_v` as terminal indices; empty off `Γ`.
    pub t_sets: Vec<Vec<usize>>,
    /// `Π_v` as pairs of terminal indices `(s, t)` with `s < t`.
    pub pi_sets: Vec<Vec<(usize, usize)>>,
    /// `(u, v, k)`: some geodesic from the `k`-th terminal uses the edge from `u` to `v`.
    pub oriented: BTreeSet<(NodeId, NodeId, usize)>,
    /// Nodes off `Γ` with zero capacity and positive length; detours avoid them.
    pub blocked: Vec<NodeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    /// `ρ⁻`, the pre-length.
    Minus,
    /// `ρ⁺`, the full length.
    Plus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoVarConstraint {
    pub terms: Vec<(usize, i8)>,
    pub rel: Relation,
    pub rhs: i128,
    /// Constraint family, 1 to 5.
    pub family: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoVarSystem {
    /// `(v, k, side)` for each variable.
    pub vars: Vec<(NodeId, usize, Side)>,
    pub constraints: Vec<TwoVarConstraint>,
}

impl TwoVarSystem {
    pub fn var(&self, v: NodeId, k: usize, side: Side) -> Option<usize> {
        self.vars.iter().position(|&x| x == (v, k, side))
    }

    pub fn is_satisfied(&self, x: &[Rational]) -> bool {
        self.constraints.iter().all(|c| {
            let lhs = c.terms.iter().fold(Rational::zero(), |acc, &(j, s)| acc + &x[j] * int(s as i64));
            let rhs = big(&BigInt::from(c.rhs));
            match c.rel {
                Relation::Le => lhs <= rhs,
                Relation::Ge => lhs >= rhs,
                Relation::Eq => lhs == rhs,
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RoundingError {
    #[error("the two-variable system is infeasible")]
    Infeasible,
    #[error("node {0} lies off every geodesic but has positive length and capacity")]
    OutsidePositive(NodeId),
    #[error("rounded length of node {0} depends on the terminal")]
    IllDefined(NodeId),
    #[error("arithmetic overflow in the two-variable system")]
    Overflow,
}

fn terminal_distances(inst: &Instance, l: &[Rational]) -> (Vec<NodeId>, Vec<Rational>, Vec<Vec<Option<Rational>>>) {
    let ell = lengths(inst, l);
    let terminals = inst.terminals();
    let dist = terminals.iter().map(|&s| shortest_paths(inst.num_nodes(), inst.edges(), &ell, s)).collect();
    (terminals, ell, dist)
}

pub fn build_gamma(inst: &Instance, l: &[Rational], lambda: &Rational) -> Result<RoundingGraph, RoundingError> {
    let n = inst.num_nodes();
    let (terminals, ell, dist) = terminal_distances(inst, l);
    let k = terminals.len();
    let on = |s: usize, t: usize, v: NodeId| match (&dist[s][v], &dist[t][v]) {
        (Some(a), Some(b)) => a + b == *lambda,
        _ => false,
    };
    let mut pi_sets = vec![Vec::new(); n];
    let mut t_sets = vec![Vec::new(); n];
    for v in 0..n {
        for s in 0..k {
            for t in s + 1..k {
                if on(s, t, v) {
                    pi_sets[v].push((s, t));
                }
            }
        }
        let mut ts: Vec<usize> = pi_sets[v].iter().flat_map(|&(s, t)| [s, t]).collect();
        ts.sort_unstable();
        ts.dedup();
        t_sets[v] = ts;
    }
    for (i, &s) in terminals.iter().enumerate() {
        if t_sets[s].is_empty() {
            t_sets[s].push(i);
        }
    }
    let in_gamma: Vec<bool> = (0..n).map(|v| !t_sets[v].is_empty()).collect();
    let mut blocked = Vec::new();
    for v in (0..n).filter(|&v| !in_gamma[v] && l[v].is_positive()) {
        if inst.cap(v) > 0 {
            return Err(RoundingError::OutsidePositive(v));
        }
        blocked.push(v);
    }
    let mut edges = Vec::new();
    let mut oriented = BTreeSet::new();
    let mut adjacent = vec![vec![false; n]; n];
    for (e, &(u, v)) in inst.edges().iter().enumerate() {
        if !(in_gamma[u] && in_gamma[v]) {
            continue;
        }
        adjacent[u][v] = true;
        adjacent[v][u] = true;
        edges.push(GammaEdge { u, v, mu: 0, is_virtual: false });
        for (x, y) in [(u, v), (v, u)] {
            for s in 0..k {
                let through = (0..k).any(|t| {
                    t != s && matches!((&dist[s][x], &dist[t][y]), (Some(a), Some(b)) if a + &ell[e] + b == *lambda)
                });
                if through {
                    oriented.insert((x, y, s));
                }
            }
        }
    }
    let free: Vec<bool> = (0..n).map(|v| !in_gamma[v] && !blocked.contains(&v)).collect();
    for u in (0..n).filter(|&u| in_gamma[u]) {
        let d = detour_costs(inst, &free, u);
        for v in (u + 1..n).filter(|&v| in_gamma[v] && !adjacent[u][v]) {
            let best = inst.neighbors(v).iter().filter_map(|&(x, _)| d[x]).min();
            if let Some(mu) = best {
                edges.push(GammaEdge { u, v, mu, is_virtual: true });
            }
        }
    }
    Ok(RoundingGraph { terminals, in_gamma, edges, t_sets, pi_sets, oriented, blocked })
}

/// Least node cost of a path through `free` nodes starting next to `u`,
/// indexed by its last node.
fn detour_costs(inst: &Instance, free: &[bool], u: NodeId) -> Vec<Option<u64>> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    let mut d: Vec<Option<u64>> = vec![None; inst.num_nodes()];
    let mut heap = BinaryHeap::new();
    for &(x, _) in inst.neighbors(u) {
        if free[x] && d[x].is_none_or(|c| inst.cost(x) < c) {
            d[x] = Some(inst.cost(x));
            heap.push(Reverse((inst.cost(x), x)));
        }
    }
    while let Some(Reverse((c, x))) = heap.pop() {
        if d[x].is_some_and(|y| y < c) {
            continue;
        }
        for &(y, _) in inst.neighbors(x) {
            let nc = c + inst.cost(y);
            if free[y] && d[y].is_none_or(|z| nc < z) {
                d[y] = Some(nc);
                heap.push(Reverse((nc, y)));
            }
        }
    }
    d
}

pub fn build_rho_system(gamma: &RoundingGraph, inst: &Instance, l: &[Rational], lambda: i128) -> TwoVarSystem {
    let mut vars = Vec::new();
    let mut index = HashMap::new();
    for v in 0..inst.num_nodes() {
        for &s in &gamma.t_sets[v] {
            for side in [Side::Minus, Side::Plus] {
                index.insert((v, s, side), vars.len());
                vars.push((v, s, side));
            }
        }
    }
    let x = |v: NodeId, s: usize, side: Side| index[&(v, s, side)];
    let mut cs = Vec::new();
    let mut push = |terms: Vec<(usize, i8)>, rel: Relation, rhs: i128, family: u8| {
        cs.push(TwoVarConstraint { terms, rel, rhs, family });
    };
    for (i, &s) in gamma.terminals.iter().enumerate() {
        push(vec![(x(s, i, Side::Minus), 1)], Relation::Eq, 0, 1);
    }
    for (v, lv) in l.iter().enumerate() {
        let rel = if lv.is_zero() { Relation::Eq } else { Relation::Ge };
        for &s in &gamma.t_sets[v] {
            push(vec![(x(v, s, Side::Plus), 1), (x(v, s, Side::Minus), -1)], rel, inst.cost(v) as i128, 2);
        }
        for &(s, t) in &gamma.pi_sets[v] {
            push(vec![(x(v, s, Side::Plus), 1), (x(v, t, Side::Minus), 1)], Relation::Eq, lambda, 3);
            push(vec![(x(v, t, Side::Plus), 1), (x(v, s, Side::Minus), 1)], Relation::Eq, lambda, 3);
        }
    }
    for e in &gamma.edges {
        let mu = e.mu as i128;
        for (u, v) in [(e.u, e.v), (e.v, e.u)] {
            for &s in gamma.t_sets[u].iter().filter(|s| gamma.t_sets[v].contains(s)) {
                let rel = if gamma.oriented.contains(&(u, v, s)) { Relation::Eq } else { Relation::Le };
                push(vec![(x(v, s, Side::Minus), 1), (x(u, s, Side::Plus), -1)], rel, mu, 4);
            }
            for &s in &gamma.t_sets[u] {
                for &t in gamma.t_sets[v].iter().filter(|&&t| t != s) {
                    if (u, s) < (v, t) {
                        push(vec![(x(u, s, Side::Plus), 1), (x(v, t, Side::Plus), 1)], Relation::Ge, lambda - mu, 5);
                    }
                }
            }
        }
    }
    TwoVarSystem { vars, constraints: cs }
}

/// A half-integer solution, via `x = (d(x⁺) − d(x⁻)) / 2` for a feasible
/// potential `d` of the doubled difference system.
pub fn solve_two_var_system(sys: &TwoVarSystem) -> Result<Vec<Rational>, RoundingError> {
    let n = sys.vars.len();
    // Node 2j stands for x_j and 2j + 1 for −x_j.
    let node = |j: usize, sign: i8| if sign > 0 { 2 * j } else { 2 * j + 1 };
    // (a, b, w): d(a) − d(b) ≤ w, i.e. an arc b → a of length w.
    let mut arcs: Vec<(usize, usize, i128)> = Vec::new();
    let mut le = |terms: &[(usize, i8)], b: i128| -> Result<(), RoundingError> {
        match *terms {
            [(i, si)] => {
                let w = b.checked_mul(2).ok_or(RoundingError::Overflow)?;
                arcs.push((node(i, si), node(i, -si), w));
            }
            [(i, si), (j, sj)] => {
                arcs.push((node(i, si), node(j, -sj), b));
                arcs.push((node(j, sj), node(i, -si), b));
            }
            _ => unreachable!("constraints have one or two terms"),
        }
        Ok(())
    };
    for c in &sys.constraints {
        let neg: Vec<(usize, i8)> = c.terms.iter().map(|&(j, s)| (j, -s)).collect();
        match c.rel {
            Relation::Le => le(&c.terms, c.rhs)?,
            Relation::Ge => le(&neg, -c.rhs)?,
            Relation::Eq => {
                le(&c.terms, c.rhs)?;
                le(&neg, -c.rhs)?;
            }
        }
    }
    let mut d = vec![0i128; 2 * n];
    let mut rounds = 0;
    loop {
        let mut changed = false;
        for &(a, b, w) in &arcs {
            let nd = d[b].checked_add(w).ok_or(RoundingError::Overflow)?;
            if nd < d[a] {
                d[a] = nd;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        rounds += 1;
        if rounds > 2 * n + 1 {
            return Err(RoundingError::Infeasible);
        }
    }
    Ok((0..n).map(|j| Rational::new(BigInt::from(d[2 * j] - d[2 * j + 1]), BigInt::from(2))).collect())
}

/// Reference solution from shortest paths in `Γ`: `ρ⁺` is the least full
/// length of a path from the terminal, `ρ⁻` the same without the last node.
pub fn rho_witness(gamma: &RoundingGraph, inst: &Instance, l: &[Rational], sys: &TwoVarSystem) -> Vec<Rational> {
    let n = inst.num_nodes();
    let w: Vec<Rational> = (0..n).map(|v| int(inst.cost(v) as i64) + &l[v]).collect();
    let mut adj = vec![Vec::new(); n];
    for e in &gamma.edges {
        adj[e.u].push((e.v, e.mu));
        adj[e.v].push((e.u, e.mu));
    }
    let full: Vec<Vec<Option<Rational>>> = gamma
        .terminals
        .iter()
        .map(|&s| {
            let mut d: Vec<Option<Rational>> = vec![None; n];
            let mut done = vec![false; n];
            d[s] = Some(w[s].clone());
            loop {
                let next = (0..n).filter(|&v| !done[v] && d[v].is_some()).min_by(|&a, &b| d[a].cmp(&d[b]));
                let Some(u) = next else { break };
                done[u] = true;
                let du = d[u].clone().unwrap();
                for &(v, mu) in &adj[u] {
                    let nd = &du + int(mu as i64) + &w[v];
                    if d[v].as_ref().is_none_or(|x| nd < *x) {
                        d[v] = Some(nd);
                    }
                }
            }
            d
        })
        .collect();
    sys.vars
        .iter()
        .map(|&(v, s, side)| {
            let f = full[s][v].clone().expect("Γ node reachable from its terminals");
            match side {
                Side::Plus => f,
                Side::Minus => f - &w[v],
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundedDual {
    pub l_hat: Vec<Rational>,
    pub gamma: RoundingGraph,
    pub system: TwoVarSystem,
    pub rho: Vec<Rational>,
}

/// A half-integer optimal dual from an optimal `l`.
pub fn round_dual(inst: &Instance, l: &[Rational], lambda: u64) -> Result<RoundedDual, RoundingError> {
    let lam = int(lambda as i64);
    let gamma = build_gamma(inst, l, &lam)?;
    let system = build_rho_system(&gamma, inst, l, lambda as i128);
    let rho = solve_two_var_system(&system)?;
    let mut l_hat = vec![Rational::zero(); inst.num_nodes()];
    for &v in &gamma.blocked {
        l_hat[v] = lam.clone();
    }
    for v in (0..inst.num_nodes()).filter(|&v| gamma.in_gamma[v]) {
        let mut value: Option<Rational> = None;
        for &s in &gamma.t_sets[v] {
            let plus = &rho[system.var(v, s, Side::Plus).unwrap()];
            let minus = &rho[system.var(v, s, Side::Minus).unwrap()];
            let x = plus - minus - int(inst.cost(v) as i64);
            match &value {
                Some(y) if *y != x => return Err(RoundingError::IllDefined(v)),
                _ => value = Some(x),
            }
        }
        l_hat[v] = value.expect("Γ nodes have terminals");
    }
    Ok(RoundedDual { l_hat, gamma, system, rho })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::{check_dual_feasible, solve_instance_dual, Network};
    use crate::model::tests::build;
    use crate::rational::{frac, is_half_integral};

    fn star() -> Instance {
        build(
            &[("v", 1, 1, false), ("s1", 2, 1, true), ("s2", 2, 1, true), ("s3", 2, 1, true)],
            &[("s1", "v"), ("s2", "v"), ("s3", "v")],
            Some(10),
        )
    }

    #[test]
    fn symmetric_pair_forces_halves() {
        let sys = TwoVarSystem {
            vars: vec![(0, 0, Side::Minus), (1, 0, Side::Minus)],
            constraints: vec![
                TwoVarConstraint { terms: vec![(0, 1), (1, -1)], rel: Relation::Le, rhs: 0, family: 4 },
                TwoVarConstraint { terms: vec![(1, 1), (0, -1)], rel: Relation::Le, rhs: 0, family: 4 },
                TwoVarConstraint { terms: vec![(0, 1), (1, 1)], rel: Relation::Eq, rhs: 1, family: 3 },
            ],
        };
        assert_eq!(solve_two_var_system(&sys).unwrap(), vec![frac(1, 2), frac(1, 2)]);
    }

    #[test]
    fn difference_system_is_integral() {
        let sys = TwoVarSystem {
            vars: vec![(0, 0, Side::Minus), (1, 0, Side::Minus), (2, 0, Side::Minus)],
            constraints: vec![
                TwoVarConstraint { terms: vec![(1, 1), (0, -1)], rel: Relation::Le, rhs: 3, family: 4 },
                TwoVarConstraint { terms: vec![(2, 1), (1, -1)], rel: Relation::Le, rhs: -2, family: 4 },
                TwoVarConstraint { terms: vec![(0, 1), (2, -1)], rel: Relation::Le, rhs: 5, family: 4 },
            ],
        };
        let x = solve_two_var_system(&sys).unwrap();
        assert!(x.iter().all(|v| v.is_integer()));
        assert!(sys.is_satisfied(&x));
    }

    #[test]
    fn negative_cycle_is_infeasible() {
        let sys = TwoVarSystem {
            vars: vec![(0, 0, Side::Minus), (1, 0, Side::Minus)],
            constraints: vec![
                TwoVarConstraint { terms: vec![(0, 1), (1, -1)], rel: Relation::Le, rhs: -1, family: 4 },
                TwoVarConstraint { terms: vec![(1, 1), (0, -1)], rel: Relation::Le, rhs: 0, family: 4 },
            ],
        };
        assert_eq!(solve_two_var_system(&sys), Err(RoundingError::Infeasible));
    }

    #[test]
    fn star_rounds_to_integer_center() {
        let g = star();
        let l = vec![int(7), int(0), int(0), int(0)];
        let gamma = build_gamma(&g, &l, &int(10)).unwrap();
        assert!(gamma.edges.iter().all(|e| !e.is_virtual));
        assert_eq!(gamma.pi_sets[0], vec![(0, 1), (0, 2), (1, 2)]);
        let r = round_dual(&g, &l, 10).unwrap();
        assert_eq!(r.l_hat, l);
        let w = rho_witness(&r.gamma, &g, &l, &r.system);
        assert!(r.system.is_satisfied(&w));
    }

    #[test]
    fn terminals_only_system() {
        let g = star();
        let l = vec![Rational::zero(); 4];
        let gamma = build_gamma(&g, &l, &int(2)).unwrap();
        let sys = build_rho_system(&gamma, &g, &l, 2);
        let fams: BTreeSet<u8> = sys.constraints.iter().map(|c| c.family).collect();
        assert_eq!(fams, BTreeSet::from([1, 2, 5]));
        // s1 and s2 are joined through v, which lies off Γ.
        assert!(gamma.edges.iter().all(|e| e.is_virtual && e.mu == 1));
        let r = round_dual(&g, &l, 2).unwrap();
        assert!(r.l_hat.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn detour_through_outside_node() {
        // s – x – t with x expensive, plus a direct geodesic s – m – t.
        let g = build(
            &[("s", 1, 1, true), ("m", 1, 1, false), ("t", 1, 1, true), ("x", 1, 5, false)],
            &[("s", "m"), ("m", "t"), ("s", "x"), ("x", "t")],
            None,
        );
        let gamma = build_gamma(&g, &[int(0), int(2), int(0), int(0)], &int(5)).unwrap();
        let virt: Vec<&GammaEdge> = gamma.edges.iter().filter(|e| e.is_virtual).collect();
        assert_eq!(virt.len(), 1);
        assert_eq!((virt[0].u, virt[0].v, virt[0].mu), (0, 2, 5));
    }

    #[test]
    fn rounding_keeps_objective_on_chain() {
        let g = build(
            &[("s", 1, 1, true), ("a", 1, 1, false), ("b", 1, 1, false), ("t", 1, 1, true)],
            &[("s", "a"), ("a", "b"), ("b", "t")],
            None,
        );
        let d = solve_instance_dual(&g, 9).unwrap();
        let r = round_dual(&g, &d.l, 9).unwrap();
        assert!(r.l_hat.iter().all(is_half_integral));
        assert!(check_dual_feasible(&Network::from_instance(&g), &r.l_hat, &int(9)));
        let obj = |l: &[Rational]| (0..4).fold(Rational::zero(), |a, v| a + int(g.cap(v) as i64) * &l[v]);
        assert_eq!(obj(&r.l_hat), d.objective);
        assert!(r.system.is_satisfied(&rho_witness(&r.gamma, &g, &d.l, &r.system)));
    }
}
