//! The full solver for a fixed `λ`.
//!
//! Capacities are doubled so that an integer optimal multiflow exists. The
//! dual LP gives lengths and the geodesic structure. Loads of one integer
//! optimum are read off from the drop in the dual optimum under a tiny
//! perturbation of the costs, on a graph where every edge is split by a free
//! node so that edge loads become node loads. These loads define a good flow
//! on the compact `H`, which is decomposed into geodesics; halving the
//! weights gives a half-integer optimum for the original capacities.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bdgraph::{
    build_compact_h, build_expensive_h, check_flow, eliminate_lower_bounds, is_good, lift_reduced_flow, locked_edges,
    AuxGraph, EdgeRole, FlowError,
};
use crate::decompose::{decompose_good_flow, walk_loads, DecomposeError};
use crate::dual::{solve_dual, DualError, DualSolution, Network};
use crate::geodesic::{geodesic_structure, is_geodesic, GeodesicError, GeodesicOutcome, GeodesicStructure};
use crate::model::{
    is_feasible, lambda_for_ncp, objective_phi, validate_instance, FlowPath, Instance, LoadFunction, Multiflow,
    ValidationReport,
};
use crate::oracle::check_complementary_slackness;
use crate::rational::{big, int, is_half_integral, Rational};
use crate::rounding::{round_dual, RoundingError};
use crate::skflow::{max_ibd_flow, to_rational, OddBarrier};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PipelineError {
    #[error("invalid instance: {0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Dual(#[from] DualError),
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
    #[error("load decoding failed: {0}")]
    Digits(String),
    #[error("loads do not form a flow on H: {0}")]
    Loads(String),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error("locked edges not saturated: value {value} of {target}")]
    Unsaturated { value: u64, target: u64, barrier: Box<OddBarrier> },
    #[error(transparent)]
    Rounding(#[from] RoundingError),
    #[error("certificate check failed: {0}")]
    Certificate(String),
}

/// `ε(v_i) = 1/U^{i+1}` for the nodes in their given order, `i` from 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbationScheme {
    pub u: u64,
    pub eps: Vec<Rational>,
}

impl PerturbationScheme {
    pub fn new(caps: &[u64]) -> Self {
        let u = caps.iter().copied().max().unwrap_or(0) + 2;
        let ub = BigInt::from(u);
        let eps = (1..=caps.len()).map(|i| Rational::new(BigInt::one(), num_traits::pow(ub.clone(), i + 1))).collect();
        PerturbationScheme { u, eps }
    }

    /// The total `Σ (U − 1) ε(v_i)`, which stays below 1.
    pub fn slack(&self) -> Rational {
        self.eps.iter().fold(Rational::zero(), |acc, e| acc + e * int(self.u as i64 - 1))
    }
}

/// Digits of `r·U^{n+1}` in base `U`, most significant first: the loads of `v_1..v_n`.
pub fn decode_loads(r: &Rational, u: u64, n: usize) -> Result<Vec<u64>, PipelineError> {
    let ub = BigInt::from(u);
    let scaled = r * big(&num_traits::pow(ub.clone(), n + 1));
    if !scaled.is_integer() || scaled.is_negative() {
        return Err(PipelineError::Digits(format!("r·U^(n+1) = {scaled} is not a natural number")));
    }
    let mut x = scaled.to_integer();
    let mut digits = vec![0u64; n];
    for d in digits.iter_mut().rev() {
        let (q, rem) = x.div_rem(&ub);
        *d = rem.to_u64().expect("digit below U");
        x = q;
    }
    if !x.is_zero() {
        return Err(PipelineError::Digits("more digits than nodes".into()));
    }
    Ok(digits)
}

/// Each edge `uv` becomes `u x_e v` with `c(x_e) = min(c(u), c(v))` and zero cost.
pub fn split_network(inst: &Instance, caps: &[u64]) -> Network {
    let n = inst.num_nodes();
    let mut net = Network::from_instance(inst);
    net.cap = caps.to_vec();
    net.edges.clear();
    for (e, &(u, v)) in inst.edges().iter().enumerate() {
        let x = n + e;
        net.terminal.push(false);
        net.cap.push(caps[u].min(caps[v]));
        net.cost.push(Rational::zero());
        net.edges.push((u, x));
        net.edges.push((x, v));
    }
    net
}

/// Node and edge loads of some integer optimal multiflow for `caps`,
/// given the optimum `base` of the unperturbed dual.
pub fn extract_loads(
    inst: &Instance,
    caps: &[u64],
    lambda: &Rational,
    base: &Rational,
) -> Result<LoadFunction, PipelineError> {
    let net = split_network(inst, caps);
    let scheme = PerturbationScheme::new(&net.cap);
    let mut pert = net.clone();
    for (c, e) in pert.cost.iter_mut().zip(&scheme.eps) {
        *c += e;
    }
    let low = solve_dual(&pert, lambda)?;
    let r = base - &low.objective;
    let digits = decode_loads(&r, scheme.u, net.num_nodes())?;
    for (v, (&d, &c)) in digits.iter().zip(&net.cap).enumerate() {
        if d > c {
            return Err(PipelineError::Digits(format!("load {d} above capacity {c} at split node {v}")));
        }
    }
    let n = inst.num_nodes();
    Ok(LoadFunction {
        node: digits[..n].iter().map(|&d| int(d as i64)).collect(),
        edge: digits[n..].iter().map(|&d| int(d as i64)).collect(),
    })
}

/// The flow on the compact `H` induced by loads of a geodesic multiflow.
pub fn loads_to_flow(
    aux: &AuxGraph,
    gs: &GeodesicStructure,
    loads: &LoadFunction,
) -> Result<Vec<Rational>, PipelineError> {
    let g = &aux.graph;
    for (e, x) in loads.edge.iter().enumerate() {
        if x.is_positive() && gs.carrier_kind(e).is_none() {
            return Err(PipelineError::Loads(format!("edge {e} is loaded but off the carrier graph")));
        }
    }
    for (v, x) in loads.node.iter().enumerate() {
        if x.is_positive() && !gs.is_carrier_node(v) {
            return Err(PipelineError::Loads(format!("node {v} is loaded but off the carrier graph")));
        }
    }
    let mut leg_sum: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for &(e, kind) in &gs.carrier {
        if let crate::geodesic::CarrierEdge::Radial { from, to } = kind {
            if let Some(k) = gs.zone(from).filter(|_| gs.zone(to).is_none()) {
                *leg_sum.entry((to, k)).or_insert_with(Rational::zero) += &loads.edge[e];
            }
        }
    }
    let f: Vec<Rational> = g
        .edges
        .iter()
        .map(|edge| match edge.role {
            EdgeRole::NodeEdge(v) | EdgeRole::HubLoop { w: v, .. } => loads.node[v].clone(),
            EdgeRole::Radial(e) | EdgeRole::Crossing(e) => loads.edge[e].clone(),
            EdgeRole::Leg { w, k, .. } => leg_sum.get(&(w, k)).cloned().unwrap_or_else(Rational::zero),
            EdgeRole::SourceArc(k) => loads.node[aux.terminals[k]].clone(),
            other => panic!("compact H has no edge of role {other:?}"),
        })
        .collect();
    check_flow(g, &f)?;
    if !is_good(aux, &f) {
        return Err(PipelineError::Loads("induced flow is not good".into()));
    }
    Ok(f)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaturatingFlow {
    /// Integer flow on `H`.
    pub flow: Vec<Rational>,
    pub value: u64,
    pub target: u64,
    pub barrier: OddBarrier,
}

/// An integer good flow on the expensive `H` saturating every locked edge,
/// through a maximum flow from a new root that feeds the locked edges.
pub fn saturating_ibd_flow(
    aux: &AuxGraph,
    locked: &[usize],
    seed: Option<u64>,
) -> Result<SaturatingFlow, PipelineError> {
    let h = &aux.graph;
    if locked.is_empty() {
        let flow = vec![Rational::zero(); h.edges.len()];
        return Ok(SaturatingFlow { flow, value: 0, target: 0, barrier: empty_barrier(h.num_nodes()) });
    }
    let red = eliminate_lower_bounds(h, locked);
    let (mf, barrier) = max_ibd_flow(&red.graph, seed);
    if mf.value != red.target {
        return Err(PipelineError::Unsaturated { value: mf.value, target: red.target, barrier: Box::new(barrier) });
    }
    let flow = lift_reduced_flow(h, &red, &to_rational(&mf.flow));
    check_flow(h, &flow)?;
    if !is_good(aux, &flow) {
        return Err(PipelineError::Certificate("saturating flow is not good".into()));
    }
    Ok(SaturatingFlow { flow, value: mf.value, target: red.target, barrier })
}

fn empty_barrier(n: usize) -> OddBarrier {
    OddBarrier { flip: Vec::new(), a: (0..n).collect(), m: Vec::new(), b: Vec::new(), capacity: 0 }
}

/// What was checked while solving, beyond the returned values.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Certificates {
    /// No T-path is shorter than `λ`, so the zero flow is optimal.
    pub zero_flow: bool,
    /// Minimum terminal distance under the optimal lengths.
    pub p: Option<Rational>,
    pub h_edges: usize,
    /// Paths emitted by the decomposition, before merging.
    pub decomposition_paths: usize,
    /// Decomposition reproduced the flow on `H` edge by edge.
    pub load_match: bool,
    pub locked: usize,
    /// Value and target of the saturating flow when some edge is locked.
    pub saturation: Option<(u64, u64)>,
    /// The saturating flow also decomposes into an optimal multiflow.
    pub saturation_optimal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub lambda: u64,
    pub multiflow: Multiflow,
    /// Optimal lengths as returned by the LP.
    pub dual: DualSolution,
    pub l_hat: Vec<Rational>,
    pub phi: Rational,
    pub certificates: Certificates,
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    /// Randomizes the augmentation order of the saturating flow.
    pub seed: Option<u64>,
}

/// Sums weights of equal paths, with a path and its reverse counted as equal.
pub fn merge_paths(f: &Multiflow) -> Multiflow {
    let mut acc: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
    for p in f.paths.iter().filter(|p| p.weight.is_positive()) {
        let mut key = p.nodes.clone();
        if key.last() < key.first() {
            key.reverse();
        }
        *acc.entry(key).or_insert_with(Rational::zero) += &p.weight;
    }
    Multiflow { paths: acc.into_iter().map(|(nodes, weight)| FlowPath { nodes, weight }).collect() }
}

fn halve(f: Multiflow) -> Multiflow {
    Multiflow { paths: f.paths.into_iter().map(|p| FlowPath { weight: p.weight / int(2), ..p }).collect() }
}

fn weighted_caps(inst: &Instance, l: &[Rational]) -> Rational {
    (0..inst.num_nodes()).fold(Rational::zero(), |acc, v| acc + int(inst.cap(v) as i64) * &l[v])
}

pub fn solve_ncp_lambda(inst: &Instance, lambda: u64, opts: &SolveOptions) -> Result<Solution, PipelineError> {
    let report = validate_instance(inst);
    if !report.is_ok() {
        return Err(PipelineError::Invalid(report));
    }
    let lam = int(lambda as i64);
    let caps2: Vec<u64> = inst.nodes().iter().map(|x| 2 * x.cap).collect();
    let net2 = Network::from_instance(inst).scale_caps(2);
    let dual2 = solve_dual(&net2, &lam)?;
    let l = dual2.l.clone();
    let dual = DualSolution { objective: weighted_caps(inst, &l), l: l.clone() };
    let mut cert = Certificates::default();

    let multiflow = match geodesic_structure(inst, &l, &lam)? {
        GeodesicOutcome::ZeroFlow { p } => {
            cert.zero_flow = true;
            cert.p = p;
            Multiflow::default()
        }
        GeodesicOutcome::Structure(gs) => {
            cert.p = Some(gs.p.clone());
            let loads = extract_loads(inst, &caps2, &lam, &dual2.objective)?;
            let h = build_compact_h(inst, &gs, &caps2);
            let f = loads_to_flow(&h, &gs, &loads)?;
            let dec = decompose_good_flow(&h, &f)?;
            cert.h_edges = h.graph.edges.len();
            cert.decomposition_paths = dec.walks.len();
            cert.load_match = walk_loads(f.len(), &dec.walks) == f;
            if !cert.load_match || dec.walks.iter().any(|(_, a)| !a.is_integer()) {
                return Err(PipelineError::Certificate("decomposition does not reproduce the flow".into()));
            }
            check_saturation(inst, &gs, &caps2, &l, &lam, opts, &mut cert)?;
            let halved = halve(dec.multiflow);
            for p in &halved.paths {
                if !is_geodesic(inst, &gs, &p.nodes) {
                    return Err(PipelineError::Certificate(format!("path {:?} is not a geodesic", p.nodes)));
                }
            }
            merge_paths(&halved)
        }
    };

    let rounded = round_dual(inst, &l, lambda)?;
    let phi = objective_phi(inst, &multiflow, &lam);
    let sol = Solution { lambda, multiflow, dual, l_hat: rounded.l_hat, phi, certificates: cert };
    certify(inst, &sol)?;
    Ok(sol)
}

fn check_saturation(
    inst: &Instance,
    gs: &GeodesicStructure,
    caps2: &[u64],
    l: &[Rational],
    lam: &Rational,
    opts: &SolveOptions,
    cert: &mut Certificates,
) -> Result<(), PipelineError> {
    let hx = build_expensive_h(inst, gs, caps2);
    let locked = locked_edges(&hx, l);
    cert.locked = locked.len();
    let sat = saturating_ibd_flow(&hx, &locked, opts.seed)?;
    if locked.is_empty() {
        cert.saturation_optimal = true;
        return Ok(());
    }
    cert.saturation = Some((sat.value, sat.target));
    let dec = decompose_good_flow(&hx, &sat.flow)?;
    let halved = halve(dec.multiflow);
    cert.saturation_optimal = is_feasible(inst, &halved) && objective_phi(inst, &halved, lam) == weighted_caps(inst, l);
    Ok(())
}

/// Feasibility, half-integrality, duality equalities and slackness for both duals.
pub fn certify(inst: &Instance, sol: &Solution) -> Result<(), PipelineError> {
    let fail = |m: String| Err(PipelineError::Certificate(m));
    let lam = int(sol.lambda as i64);
    if !is_feasible(inst, &sol.multiflow) {
        return fail("multiflow is infeasible".into());
    }
    if !sol.multiflow.paths.iter().all(|p| is_half_integral(&p.weight)) {
        return fail("weights are not half-integers".into());
    }
    if !sol.l_hat.iter().all(|x| is_half_integral(x) && !x.is_negative()) {
        return fail("rounded lengths are not nonnegative half-integers".into());
    }
    let phi = objective_phi(inst, &sol.multiflow, &lam);
    let cl = weighted_caps(inst, &sol.dual.l);
    let cl_hat = weighted_caps(inst, &sol.l_hat);
    if phi != cl || cl != cl_hat {
        return fail(format!("Φ = {phi}, c·l = {cl}, c·l̂ = {cl_hat}"));
    }
    check_complementary_slackness(inst, &sol.multiflow, &sol.dual.l, &lam).or_else(fail)?;
    check_complementary_slackness(inst, &sol.multiflow, &sol.l_hat, &lam).or_else(|m| fail(format!("rounded: {m}")))?;
    for v in 0..inst.num_nodes() {
        if sol.dual.l[v].is_zero() && !sol.l_hat[v].is_zero() {
            return fail(format!("rounded length positive at node {v} where l is zero"));
        }
    }
    Ok(())
}

/// The min-cost maximum multiflow, through a large enough `λ`.
pub fn solve_ncp(inst: &Instance, opts: &SolveOptions) -> Result<Solution, PipelineError> {
    solve_ncp_lambda(inst, lambda_for_ncp(inst), opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::build;
    use crate::model::{multiflow_cost, multiflow_value};
    use crate::rational::frac;

    fn star() -> Instance {
        build(
            &[("v", 1, 1, false), ("s1", 2, 1, true), ("s2", 2, 1, true), ("s3", 2, 1, true)],
            &[("s1", "v"), ("s2", "v"), ("s3", "v")],
            Some(10),
        )
    }

    #[test]
    fn perturbation_of_two_nodes() {
        let p = PerturbationScheme::new(&[1, 1]);
        assert_eq!(p.u, 3);
        assert_eq!(p.eps, vec![frac(1, 9), frac(1, 27)]);
        assert!(p.slack() < int(1));
    }

    #[test]
    fn digits_in_base_u() {
        assert_eq!(decode_loads(&frac(7, 27), 3, 2).unwrap(), vec![2, 1]);
        assert!(decode_loads(&frac(1, 2), 3, 2).is_err());
        assert!(decode_loads(&int(1), 3, 2).is_err());
    }

    #[test]
    fn star_loads_saturate_center() {
        let g = star();
        let caps: Vec<u64> = g.nodes().iter().map(|x| 2 * x.cap).collect();
        let net = Network::from_instance(&g).scale_caps(2);
        let d = solve_dual(&net, &int(10)).unwrap();
        let loads = extract_loads(&g, &caps, &int(10), &d.objective).unwrap();
        assert_eq!(loads.node[0], int(2));
    }

    #[test]
    fn star_solution() {
        let sol = solve_ncp_lambda(&star(), 10, &SolveOptions::default()).unwrap();
        assert_eq!(sol.phi, int(7));
        assert_eq!(sol.l_hat, vec![int(7), int(0), int(0), int(0)]);
        assert_eq!(sol.certificates.saturation, Some((4, 4)));
        assert!(sol.certificates.saturation_optimal);
    }

    #[test]
    fn zero_lambda() {
        let sol = solve_ncp_lambda(&star(), 0, &SolveOptions::default()).unwrap();
        assert!(sol.multiflow.paths.is_empty());
        assert_eq!(sol.phi, int(0));
        assert!(sol.certificates.zero_flow);
    }

    #[test]
    fn chain_solution() {
        let g = build(&[("s", 1, 1, true), ("v", 1, 1, false), ("t", 1, 1, true)], &[("s", "v"), ("v", "t")], None);
        let sol = solve_ncp_lambda(&g, 100, &SolveOptions::default()).unwrap();
        assert_eq!(sol.phi, int(97));
        assert_eq!(sol.multiflow.paths, vec![FlowPath { nodes: vec![0, 1, 2], weight: int(1) }]);
    }

    #[test]
    fn ncp_on_star() {
        let g = star();
        let sol = solve_ncp(&g, &SolveOptions::default()).unwrap();
        assert_eq!(multiflow_value(&sol.multiflow), int(1));
        assert_eq!(multiflow_cost(&g, &sol.multiflow).unwrap(), int(3));
    }
}
