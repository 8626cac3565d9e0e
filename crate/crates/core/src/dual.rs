//! The dual of the node-capacitated multiflow problem as a compact LP.
//!
//! Besides the node lengths `l` every terminal `s` gets a free potential
//! `φ_s`. Edge rows force `|φ_s(u) − φ_s(v)| ≤ ā(uv) + l̄(uv)`, and terminal
//! rows force `φ_s(t) − φ_s(s) ≥ λ`, so `φ_s(t)` lower-bounds the distance.

use num_traits::{Signed, Zero};

use crate::lp::{solve_lp, LpError, LpProblem, LpStatus, Relation, Sense, VarBound};
use crate::model::{Instance, NodeId};
use crate::rational::{half, int, Rational};

/// Graph data for the LPs; costs may be any nonnegative rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    pub terminal: Vec<bool>,
    pub edges: Vec<(NodeId, NodeId)>,
    pub cap: Vec<u64>,
    pub cost: Vec<Rational>,
}

impl Network {
    pub fn from_instance(inst: &Instance) -> Self {
        Network {
            terminal: inst.nodes().iter().map(|n| n.terminal).collect(),
            edges: inst.edges().to_vec(),
            cap: inst.nodes().iter().map(|n| n.cap).collect(),
            cost: inst.nodes().iter().map(|n| int(n.cost as i64)).collect(),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.terminal.len()
    }

    pub fn terminals(&self) -> Vec<NodeId> {
        (0..self.num_nodes()).filter(|&v| self.terminal[v]).collect()
    }

    /// `α_v`: one at terminals, one half elsewhere.
    pub fn alpha(&self, v: NodeId) -> Rational {
        if self.terminal[v] {
            int(1)
        } else {
            half()
        }
    }

    /// `w̄(uv) = α_u·w(u) + α_v·w(v)` for every edge.
    pub fn bar(&self, w: &[Rational]) -> Vec<Rational> {
        self.edges.iter().map(|&(u, v)| self.alpha(u) * &w[u] + self.alpha(v) * &w[v]).collect()
    }

    pub fn scale_caps(&self, k: u64) -> Self {
        Network { cap: self.cap.iter().map(|c| c * k).collect(), ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompactDual {
    pub problem: LpProblem,
    pub terminals: Vec<NodeId>,
    pub l_vars: Vec<usize>,
    /// `phi_vars[k][v]` is the potential of node `v` for the `k`-th terminal.
    pub phi_vars: Vec<Vec<usize>>,
}

pub fn build_compact_dual(net: &Network, lambda: &Rational) -> CompactDual {
    let n = net.num_nodes();
    let terminals = net.terminals();
    let mut p = LpProblem::new(Sense::Minimize);
    let l_vars: Vec<usize> = (0..n).map(|v| p.add_var(VarBound::NonNegative, int(net.cap[v] as i64))).collect();
    let phi_vars: Vec<Vec<usize>> =
        terminals.iter().map(|_| (0..n).map(|_| p.add_var(VarBound::Free, Rational::zero())).collect()).collect();
    let abar = net.bar(&net.cost);
    for phi in &phi_vars {
        for (e, &(u, v)) in net.edges.iter().enumerate() {
            for (x, y) in [(u, v), (v, u)] {
                let coeffs =
                    vec![(phi[x], int(1)), (phi[y], int(-1)), (l_vars[u], -net.alpha(u)), (l_vars[v], -net.alpha(v))];
                p.add_constraint(coeffs, Relation::Le, abar[e].clone());
            }
        }
    }
    for (k, &s) in terminals.iter().enumerate() {
        for &t in &terminals {
            if t != s {
                let coeffs = vec![(phi_vars[k][t], int(1)), (phi_vars[k][s], int(-1))];
                p.add_constraint(coeffs, Relation::Ge, lambda.clone());
            }
        }
    }
    CompactDual { problem: p, terminals, l_vars, phi_vars }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualSolution {
    pub l: Vec<Rational>,
    pub objective: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DualError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("dual LP reported {0:?}")]
    Status(LpStatus),
}

/// An optimal basic solution of the dual LP.
pub fn solve_dual(net: &Network, lambda: &Rational) -> Result<DualSolution, DualError> {
    let cd = build_compact_dual(net, lambda);
    let r = solve_lp(&cd.problem)?;
    if r.status != LpStatus::Optimal {
        return Err(DualError::Status(r.status));
    }
    let l = cd.l_vars.iter().map(|&j| r.primal[j].clone()).collect();
    Ok(DualSolution { l, objective: r.objective })
}

pub fn solve_instance_dual(inst: &Instance, lambda: u64) -> Result<DualSolution, DualError> {
    solve_dual(&Network::from_instance(inst), &int(lambda as i64))
}

/// `l ≥ 0` and every terminal pair is at `ā + l̄` distance at least `λ`.
pub fn check_dual_feasible(net: &Network, l: &[Rational], lambda: &Rational) -> bool {
    if l.len() != net.num_nodes() || l.iter().any(|x| x.is_negative()) {
        return false;
    }
    let w: Vec<Rational> = net.cost.iter().zip(l).map(|(a, x)| a + x).collect();
    let ell = net.bar(&w);
    let terminals = net.terminals();
    terminals.iter().all(|&s| {
        let d = crate::geodesic::shortest_paths(net.num_nodes(), &net.edges, &ell, s);
        terminals.iter().all(|&t| t == s || d[t].as_ref().is_none_or(|x| x >= lambda))
    })
}
