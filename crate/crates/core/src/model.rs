//! Networks, multiflows, loads and the objective.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::rational::{int, Rational};

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub name: String,
    pub cap: u64,
    pub cost: u64,
    pub terminal: bool,
}

/// Undirected simple graph with node capacities, node costs and a terminal set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    nodes: Vec<Node>,
    edges: Vec<(NodeId, NodeId)>,
    lambda: Option<u64>,
    adj: Vec<Vec<(NodeId, EdgeId)>>,
    edge_index: HashMap<(NodeId, NodeId), EdgeId>,
}

impl Instance {
    pub fn new(nodes: Vec<Node>, edges: Vec<(NodeId, NodeId)>, lambda: Option<u64>) -> Self {
        let mut adj = vec![Vec::new(); nodes.len()];
        let mut edge_index = HashMap::new();
        for (i, &(u, v)) in edges.iter().enumerate() {
            assert!(u < nodes.len() && v < nodes.len(), "edge endpoint out of range");
            adj[u].push((v, i));
            if u != v {
                adj[v].push((u, i));
            }
            edge_index.entry(key(u, v)).or_insert(i);
        }
        Instance { nodes, edges, lambda, adj, edge_index }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, v: NodeId) -> &Node {
        &self.nodes[v]
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn lambda(&self) -> Option<u64> {
        self.lambda
    }

    pub fn with_lambda(&self, lambda: Option<u64>) -> Self {
        let mut out = self.clone();
        out.lambda = lambda;
        out
    }

    pub fn neighbors(&self, v: NodeId) -> &[(NodeId, EdgeId)] {
        &self.adj[v]
    }

    pub fn edge_between(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        self.edge_index.get(&key(u, v)).copied()
    }

    pub fn is_terminal(&self, v: NodeId) -> bool {
        self.nodes[v].terminal
    }

    pub fn terminals(&self) -> Vec<NodeId> {
        (0..self.nodes.len()).filter(|&v| self.nodes[v].terminal).collect()
    }

    pub fn cap(&self, v: NodeId) -> u64 {
        self.nodes[v].cap
    }

    pub fn cost(&self, v: NodeId) -> u64 {
        self.nodes[v].cost
    }

    pub fn caps_big(&self) -> Vec<BigInt> {
        self.nodes.iter().map(|n| BigInt::from(n.cap)).collect()
    }

    pub fn costs_big(&self) -> Vec<BigInt> {
        self.nodes.iter().map(|n| BigInt::from(n.cost)).collect()
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.name == name)
    }

    /// Same graph with every capacity multiplied by `k`.
    pub fn scale_caps(&self, k: u64) -> Self {
        let nodes = self.nodes.iter().map(|n| Node { cap: n.cap * k, ..n.clone() }).collect();
        Instance::new(nodes, self.edges.clone(), self.lambda)
    }

    pub fn total_cap(&self) -> u64 {
        self.nodes.iter().map(|n| n.cap).sum()
    }

    pub fn total_cost(&self) -> u64 {
        self.nodes.iter().map(|n| n.cost).sum()
    }
}

fn key(u: NodeId, v: NodeId) -> (NodeId, NodeId) {
    (u.min(v), u.max(v))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationFailure {
    NonPositiveCost(String),
    TooFewTerminals(usize),
    SelfLoop(String),
    ParallelEdge(String, String),
}

impl fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationFailure::NonPositiveCost(n) => {
                write!(f, "node {n}: cost must be strictly positive")
            }
            ValidationFailure::TooFewTerminals(k) => {
                write!(f, "need ≥ 2 terminals (found {k})")
            }
            ValidationFailure::SelfLoop(n) => write!(f, "self-loop at node {n}"),
            ValidationFailure::ParallelEdge(a, b) => write!(f, "parallel edge {a} {b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub failures: Vec<ValidationFailure>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.failures.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

pub fn validate_instance(inst: &Instance) -> ValidationReport {
    let mut failures = Vec::new();
    for n in &inst.nodes {
        if n.cost == 0 {
            failures.push(ValidationFailure::NonPositiveCost(n.name.clone()));
        }
    }
    let k = inst.nodes.iter().filter(|n| n.terminal).count();
    if k < 2 {
        failures.push(ValidationFailure::TooFewTerminals(k));
    }
    let mut seen = HashMap::new();
    for &(u, v) in &inst.edges {
        if u == v {
            failures.push(ValidationFailure::SelfLoop(inst.nodes[u].name.clone()));
        } else if seen.insert(key(u, v), ()).is_some() {
            failures.push(ValidationFailure::ParallelEdge(inst.nodes[u].name.clone(), inst.nodes[v].name.clone()));
        }
    }
    ValidationReport { failures }
}

/// A weighted T-path given by its node sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowPath {
    pub nodes: Vec<NodeId>,
    pub weight: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Multiflow {
    pub paths: Vec<FlowPath>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PathError {
    #[error("path has fewer than two nodes")]
    TooShort,
    #[error("path endpoints must be distinct terminals")]
    BadEnds,
    #[error("path repeats a node")]
    RepeatedNode,
    #[error("path uses a non-edge")]
    NotAnEdge,
    #[error("path has an inner terminal")]
    InnerTerminal,
    #[error("path weight is negative")]
    NegativeWeight,
}

/// Checks that `nodes` is a T-path: a simple path whose ends, and only ends, are terminals.
pub fn check_t_path(inst: &Instance, nodes: &[NodeId]) -> Result<(), PathError> {
    if nodes.len() < 2 {
        return Err(PathError::TooShort);
    }
    let (s, t) = (nodes[0], nodes[nodes.len() - 1]);
    if s == t || !inst.is_terminal(s) || !inst.is_terminal(t) {
        return Err(PathError::BadEnds);
    }
    let mut seen = vec![false; inst.num_nodes()];
    for &v in nodes {
        if std::mem::replace(&mut seen[v], true) {
            return Err(PathError::RepeatedNode);
        }
    }
    if nodes[1..nodes.len() - 1].iter().any(|&v| inst.is_terminal(v)) {
        return Err(PathError::InnerTerminal);
    }
    if nodes.windows(2).any(|w| inst.edge_between(w[0], w[1]).is_none()) {
        return Err(PathError::NotAnEdge);
    }
    Ok(())
}

pub fn check_multiflow(inst: &Instance, f: &Multiflow) -> Result<(), PathError> {
    for p in &f.paths {
        if p.weight.is_negative() {
            return Err(PathError::NegativeWeight);
        }
        check_t_path(inst, &p.nodes)?;
    }
    Ok(())
}

pub fn multiflow_value(f: &Multiflow) -> Rational {
    f.paths.iter().fold(Rational::zero(), |acc, p| acc + &p.weight)
}

pub fn path_cost(costs: &[Rational], nodes: &[NodeId]) -> Rational {
    nodes.iter().fold(Rational::zero(), |acc, &v| acc + &costs[v])
}

pub fn node_costs(inst: &Instance) -> Vec<Rational> {
    inst.nodes.iter().map(|n| int(n.cost as i64)).collect()
}

/// `a(F) = Σ F(P)·a(P)`; fails on a malformed path.
pub fn multiflow_cost(inst: &Instance, f: &Multiflow) -> Result<Rational, PathError> {
    check_multiflow(inst, f)?;
    let costs = node_costs(inst);
    Ok(multiflow_cost_with(&costs, f))
}

pub fn multiflow_cost_with(costs: &[Rational], f: &Multiflow) -> Rational {
    f.paths.iter().fold(Rational::zero(), |acc, p| acc + &p.weight * path_cost(costs, &p.nodes))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadFunction {
    pub node: Vec<Rational>,
    pub edge: Vec<Rational>,
}

pub fn load_function(inst: &Instance, f: &Multiflow) -> LoadFunction {
    let mut node = vec![Rational::zero(); inst.num_nodes()];
    let mut edge = vec![Rational::zero(); inst.edges().len()];
    for p in &f.paths {
        for &v in &p.nodes {
            node[v] += &p.weight;
        }
        for w in p.nodes.windows(2) {
            if let Some(e) = inst.edge_between(w[0], w[1]) {
                edge[e] += &p.weight;
            }
        }
    }
    LoadFunction { node, edge }
}

/// Node capacity violations, if any.
pub fn is_feasible(inst: &Instance, f: &Multiflow) -> bool {
    if check_multiflow(inst, f).is_err() {
        return false;
    }
    let load = load_function(inst, f);
    load.node.iter().enumerate().all(|(v, x)| *x <= int(inst.cap(v) as i64))
}

/// `Φ(F, a, λ) = λ·val(F) − a(F)`.
pub fn objective_phi(inst: &Instance, f: &Multiflow, lambda: &Rational) -> Rational {
    objective_phi_with(&node_costs(inst), f, lambda)
}

pub fn objective_phi_with(costs: &[Rational], f: &Multiflow, lambda: &Rational) -> Rational {
    lambda * multiflow_value(f) - multiflow_cost_with(costs, f)
}

/// `2·c(V)·a(V) + 1`, large enough for a maximum-value solution.
pub fn lambda_for_ncp(inst: &Instance) -> u64 {
    2 * inst.total_cap() * inst.total_cost() + 1
}

/// `c·l` for a node weighting `l`.
pub fn weighted_sum(caps: &[u64], l: &[Rational]) -> Rational {
    caps.iter().zip(l).fold(Rational::zero(), |acc, (&c, x)| acc + int(c as i64) * x)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rational::frac;

    pub fn build(nodes: &[(&str, u64, u64, bool)], edges: &[(&str, &str)], lambda: Option<u64>) -> Instance {
        let nodes: Vec<Node> =
            nodes.iter().map(|&(n, c, a, t)| Node { name: n.to_string(), cap: c, cost: a, terminal: t }).collect();
        let id = |s: &str| nodes.iter().position(|n| n.name == s).unwrap();
        let e = edges.iter().map(|&(a, b)| (id(a), id(b))).collect();
        Instance::new(nodes, e, lambda)
    }

    fn chain() -> Instance {
        build(&[("s", 1, 1, true), ("v", 1, 1, false), ("t", 1, 1, true)], &[("s", "v"), ("v", "t")], Some(100))
    }

    #[test]
    fn lambda_ncp_values() {
        let one = build(&[("s", 5, 3, true)], &[], None);
        assert_eq!(lambda_for_ncp(&one), 31);
        let unit = build(&[("s", 1, 1, true)], &[], None);
        assert_eq!(lambda_for_ncp(&unit), 3);
        let empty = build(&[("s", 0, 4, true)], &[], None);
        assert_eq!(lambda_for_ncp(&empty), 1);
    }

    #[test]
    fn validation_reports() {
        let bad = build(&[("s", 1, 0, true), ("t", 1, 1, false)], &[("s", "t")], None);
        let r = validate_instance(&bad);
        assert_eq!(r.failures.len(), 2);
        assert!(r.to_string().contains("cost must be strictly positive"));
        assert!(r.to_string().contains("need ≥ 2 terminals"));
        assert!(validate_instance(&chain()).is_ok());
    }

    #[test]
    fn chain_objective() {
        let g = chain();
        let f = Multiflow { paths: vec![FlowPath { nodes: vec![0, 1, 2], weight: int(1) }] };
        assert_eq!(multiflow_value(&f), int(1));
        assert_eq!(multiflow_cost(&g, &f).unwrap(), int(3));
        assert_eq!(objective_phi(&g, &f, &int(100)), int(97));
        assert!(is_feasible(&g, &f));
        let loads = load_function(&g, &f);
        assert_eq!(loads.node, vec![int(1); 3]);
        assert_eq!(loads.edge, vec![int(1); 2]);
    }

    #[test]
    fn objective_scales() {
        let g = chain();
        let f = Multiflow { paths: vec![FlowPath { nodes: vec![2, 1, 0], weight: frac(1, 2) }] };
        let a2: Vec<Rational> = node_costs(&g).iter().map(|x| x * int(2)).collect();
        assert_eq!(objective_phi_with(&a2, &f, &int(200)), objective_phi(&g, &f, &int(100)) * int(2));
    }

    #[test]
    fn rejects_malformed_paths() {
        let g = chain();
        assert_eq!(check_t_path(&g, &[0]), Err(PathError::TooShort));
        assert_eq!(check_t_path(&g, &[0, 2]), Err(PathError::NotAnEdge));
        assert_eq!(check_t_path(&g, &[0, 1]), Err(PathError::BadEnds));
        let f = Multiflow { paths: vec![FlowPath { nodes: vec![0, 1, 0], weight: int(1) }] };
        assert!(multiflow_cost(&g, &f).is_err());
        let over = Multiflow { paths: vec![FlowPath { nodes: vec![0, 1, 2], weight: int(2) }] };
        assert!(!is_feasible(&g, &over));
    }
}
