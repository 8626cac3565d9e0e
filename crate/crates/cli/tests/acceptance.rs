//! Acceptance criteria, one line each. Every comparison is exact.

use std::process::ExitCode;
use std::time::Instant;

use ncflow::bdgraph::{build_compact_h, build_expensive_h, check_flow, is_good, locked_edges, BdGraph};
use ncflow::decompose::{decompose_good_flow, walk_loads};
use ncflow::dual::{check_dual_feasible, solve_dual, Network};
use ncflow::geodesic::{geodesic_structure, is_geodesic, GeodesicOutcome};
use ncflow::lp::{solve_lp, LpProblem, LpStatus, Relation, Sense, VarBound};
use ncflow::model::{
    is_feasible, lambda_for_ncp, multiflow_cost, multiflow_value, objective_phi, weighted_sum, Instance,
};
use ncflow::oracle::{
    brute_force_max_ibd, brute_force_primal, check_complementary_slackness, enumerate_t_paths, random_bd_graph,
    random_instance,
};
use ncflow::pipeline::{extract_loads, loads_to_flow, saturating_ibd_flow, solve_ncp_lambda, Solution, SolveOptions};
use ncflow::rational::{int, is_half_integral, Rational};
use ncflow::skflow::{barrier_capacity, max_ibd_flow, verify_barrier};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PIPELINE_RUNS: usize = 320;
const BD_GRAPHS: usize = 220;
const CANONICITY_GRAPHS: usize = 60;
const TWO_TERMINAL_RUNS: usize = 60;

type Check = Result<String, String>;

struct Run {
    inst: Instance,
    lambda: u64,
    sol: Solution,
    optimum: Rational,
}

fn caps(inst: &Instance) -> Vec<u64> {
    inst.nodes().iter().map(|n| n.cap).collect()
}

fn node_sum(inst: &Instance, l: &[Rational], path: &[usize]) -> Rational {
    path.iter().fold(Rational::zero(), |acc, &v| acc + int(inst.cost(v) as i64) + &l[v])
}

fn pipeline_runs() -> Result<Vec<Run>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut runs = Vec::new();
    for i in 0..PIPELINE_RUNS {
        let n = rng.gen_range(3..=8);
        let inst = random_instance(&mut rng, n, 0.3);
        let lambda = if i % 2 == 0 { rng.gen_range(0..=20) } else { lambda_for_ncp(&inst) };
        let sol = solve_ncp_lambda(&inst, lambda, &SolveOptions::default())
            .map_err(|e| format!("instance {i} (lambda {lambda}): {e}"))?;
        let (_, optimum) = brute_force_primal(&inst, &int(lambda as i64)).map_err(|e| e.to_string())?;
        runs.push(Run { inst, lambda, sol, optimum });
    }
    Ok(runs)
}

fn half_integer_primal(runs: &[Run]) -> Check {
    let mut fractional = 0;
    for (i, r) in runs.iter().enumerate() {
        if !r.sol.multiflow.paths.iter().all(|p| is_half_integral(&p.weight) && p.weight.is_positive()) {
            return Err(format!("instance {i}: weights are not positive half-integers"));
        }
        if !is_feasible(&r.inst, &r.sol.multiflow) {
            return Err(format!("instance {i}: infeasible"));
        }
        if r.sol.phi != r.optimum || objective_phi(&r.inst, &r.sol.multiflow, &int(r.lambda as i64)) != r.optimum {
            return Err(format!("instance {i}: phi {} but optimum {}", r.sol.phi, r.optimum));
        }
        fractional += r.sol.multiflow.paths.iter().any(|p| !p.weight.is_integer()) as usize;
    }
    Ok(format!("{} instances match the path LP optimum, {fractional} with half weights", runs.len()))
}

fn duality_certificate(runs: &[Run]) -> Check {
    for (i, r) in runs.iter().enumerate() {
        let lam = int(r.lambda as i64);
        let c = caps(&r.inst);
        let (cl, cl_hat) = (weighted_sum(&c, &r.sol.dual.l), weighted_sum(&c, &r.sol.l_hat));
        if r.sol.phi != cl || cl != cl_hat {
            return Err(format!("instance {i}: phi {}, c.l {cl}, c.l_hat {cl_hat}", r.sol.phi));
        }
        check_complementary_slackness(&r.inst, &r.sol.multiflow, &r.sol.dual.l, &lam)
            .map_err(|m| format!("instance {i}, l: {m}"))?;
        check_complementary_slackness(&r.inst, &r.sol.multiflow, &r.sol.l_hat, &lam)
            .map_err(|m| format!("instance {i}, l_hat: {m}"))?;
    }
    Ok(format!("phi = c.l = c.l_hat and slackness on {} instances", runs.len()))
}

fn half_integer_dual(runs: &[Run]) -> Check {
    let (mut paths, mut fractional) = (0usize, 0usize);
    for (i, r) in runs.iter().enumerate() {
        let lam = int(r.lambda as i64);
        if !r.sol.l_hat.iter().all(|x| is_half_integral(x) && !x.is_negative()) {
            return Err(format!("instance {i}: l_hat is not a nonnegative half-integer vector"));
        }
        fractional += r.sol.l_hat.iter().any(|x| !x.is_integer()) as usize;
        for p in enumerate_t_paths(&r.inst).map_err(|e| e.to_string())? {
            paths += 1;
            let rounded = node_sum(&r.inst, &r.sol.l_hat, &p);
            if rounded < lam {
                return Err(format!("instance {i}: T-path {p:?} has rounded length {rounded} < {lam}"));
            }
            if node_sum(&r.inst, &r.sol.dual.l, &p) == lam && rounded != lam {
                return Err(format!("instance {i}: geodesic {p:?} has rounded length {rounded}"));
            }
        }
        if (0..r.inst.num_nodes()).any(|v| r.sol.dual.l[v].is_zero() && !r.sol.l_hat[v].is_zero()) {
            return Err(format!("instance {i}: l_hat positive where l is zero"));
        }
    }
    Ok(format!("{paths} T-paths checked, {fractional} instances with half lengths"))
}

fn random_graph(rng: &mut ChaCha8Rng) -> BdGraph {
    let n = rng.gen_range(2..=12);
    let m = rng.gen_range(n..=2 * n + 2).min(18);
    random_bd_graph(rng, n, m, 3)
}

fn max_flow_min_barrier() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut positive = 0;
    for i in 0..BD_GRAPHS {
        let g = random_graph(&mut rng);
        let (mf, barrier) = max_ibd_flow(&g, None);
        check_flow(&g, &ncflow::skflow::to_rational(&mf.flow)).map_err(|e| format!("graph {i}: {e}"))?;
        let cap = barrier_capacity(&g, &barrier).map_err(|e| format!("graph {i}: {e}"))?;
        let brute = brute_force_max_ibd(&g);
        if mf.value as i64 != cap || mf.value != brute {
            return Err(format!("graph {i}: flow {}, barrier {cap}, packing {brute}", mf.value));
        }
        verify_barrier(&g, &barrier, Some(&mf.flow)).map_err(|e| format!("graph {i}: {e}"))?;
        positive += (mf.value > 0) as usize;
    }
    Ok(format!("{BD_GRAPHS} graphs, {positive} with positive value"))
}

fn barrier_canonicity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut nontrivial = 0;
    for i in 0..CANONICITY_GRAPHS {
        let g = random_graph(&mut rng);
        let barriers: Vec<_> = [3u64, 5, 8].iter().map(|&s| max_ibd_flow(&g, Some(s)).1).collect();
        if barriers.windows(2).any(|w| w[0] != w[1]) {
            return Err(format!("graph {i}: barriers differ across augmentation orders"));
        }
        nontrivial += (!barriers[0].b.is_empty() || !barriers[0].flip.is_empty()) as usize;
    }
    Ok(format!("{CANONICITY_GRAPHS} graphs x 3 orders identical, {nontrivial} with odd parts or flips"))
}

fn saturation(runs: &[Run]) -> Check {
    let mut checked = 0;
    for (i, r) in runs.iter().enumerate() {
        let lam = int(r.lambda as i64);
        let GeodesicOutcome::Structure(gs) =
            geodesic_structure(&r.inst, &r.sol.dual.l, &lam).map_err(|e| e.to_string())?
        else {
            continue;
        };
        let caps2: Vec<u64> = caps(&r.inst).iter().map(|c| 2 * c).collect();
        let hx = build_expensive_h(&r.inst, &gs, &caps2);
        let locked = locked_edges(&hx, &r.sol.dual.l);
        if locked.is_empty() {
            continue;
        }
        let sat = saturating_ibd_flow(&hx, &locked, Some(i as u64)).map_err(|e| format!("instance {i}: {e}"))?;
        let want: u64 = locked.iter().map(|&e| 2 * hx.graph.edges[e].cap).sum();
        if sat.value != want || sat.target != want {
            return Err(format!("instance {i}: value {} target {} expected {want}", sat.value, sat.target));
        }
        check_flow(&hx.graph, &sat.flow).map_err(|e| format!("instance {i}: {e}"))?;
        if !is_good(&hx, &sat.flow) {
            return Err(format!("instance {i}: saturating flow is not good"));
        }
        if locked.iter().any(|&e| sat.flow[e] != int(hx.graph.edges[e].cap as i64)) {
            return Err(format!("instance {i}: a locked edge is not saturated"));
        }
        checked += 1;
    }
    Ok(format!("{checked} runs with locked edges saturated by good flows"))
}

fn decomposition(runs: &[Run]) -> Check {
    let mut checked = 0;
    for (i, r) in runs.iter().enumerate() {
        let lam = int(r.lambda as i64);
        let GeodesicOutcome::Structure(gs) =
            geodesic_structure(&r.inst, &r.sol.dual.l, &lam).map_err(|e| e.to_string())?
        else {
            continue;
        };
        let caps2: Vec<u64> = caps(&r.inst).iter().map(|c| 2 * c).collect();
        let net2 = Network::from_instance(&r.inst).scale_caps(2);
        let base = solve_dual(&net2, &lam).map_err(|e| e.to_string())?.objective;
        let loads = extract_loads(&r.inst, &caps2, &lam, &base).map_err(|e| format!("instance {i}: {e}"))?;
        let h = build_compact_h(&r.inst, &gs, &caps2);
        let f = loads_to_flow(&h, &gs, &loads).map_err(|e| format!("instance {i}: {e}"))?;
        let dec = decompose_good_flow(&h, &f).map_err(|e| format!("instance {i}: {e}"))?;
        if walk_loads(f.len(), &dec.walks) != f {
            return Err(format!("instance {i}: walk loads differ from the flow"));
        }
        if dec.walks.len() > h.graph.edges.len() {
            return Err(format!("instance {i}: {} walks for {} edges", dec.walks.len(), h.graph.edges.len()));
        }
        if !dec.walks.iter().all(|(_, a)| a.is_integer() && a.is_positive()) {
            return Err(format!("instance {i}: integral flow gave a fractional weight"));
        }
        if let Some(p) = dec.multiflow.paths.iter().find(|p| !is_geodesic(&r.inst, &gs, &p.nodes)) {
            return Err(format!("instance {i}: {:?} is not a geodesic", p.nodes));
        }
        checked += 1;
    }
    Ok(format!("{checked} flows decomposed exactly into geodesics"))
}

/// Maximum value, then minimum cost at that value, as arc-flow LPs on the split digraph.
fn min_cost_max_flow(inst: &Instance) -> (Rational, Rational) {
    let t = inst.terminals();
    let n = inst.num_nodes();
    // Arcs: node arcs v_in -> v_out, edge arcs u_out -> v_in, then source and sink arcs.
    let mut arcs: Vec<(usize, usize, Option<u64>, u64)> =
        (0..n).map(|v| (v, n + v, Some(inst.cap(v)), inst.cost(v))).collect();
    for &(u, v) in inst.edges() {
        arcs.push((n + u, v, None, 0));
        arcs.push((n + v, u, None, 0));
    }
    let (src, snk) = (2 * n, 2 * n + 1);
    arcs.push((src, t[0], None, 0));
    arcs.push((n + t[1], snk, None, 0));
    let value_arc = arcs.len() - 1;
    let build = |sense: Sense, obj: &dyn Fn(usize) -> i64, fixed: Option<&Rational>| {
        let mut lp = LpProblem::new(sense);
        for j in 0..arcs.len() {
            lp.add_var(VarBound::NonNegative, int(obj(j)));
        }
        for (j, a) in arcs.iter().enumerate() {
            if let Some(c) = a.2 {
                lp.add_constraint(vec![(j, int(1))], Relation::Le, int(c as i64));
            }
        }
        for x in 0..2 * n {
            let coeffs: Vec<_> = arcs
                .iter()
                .enumerate()
                .filter_map(|(j, a)| match (a.0 == x, a.1 == x) {
                    (true, false) => Some((j, int(1))),
                    (false, true) => Some((j, int(-1))),
                    _ => None,
                })
                .collect();
            lp.add_constraint(coeffs, Relation::Eq, int(0));
        }
        if let Some(v) = fixed {
            lp.add_constraint(vec![(value_arc, int(1))], Relation::Eq, v.clone());
        }
        let r = solve_lp(&lp).expect("flow LP solves");
        assert_eq!(r.status, LpStatus::Optimal);
        r.objective
    };
    let value = build(Sense::Maximize, &|j| (j == value_arc) as i64, None);
    let cost = build(Sense::Minimize, &|j| arcs[j].3 as i64, Some(&value));
    (value, cost)
}

fn two_terminal_specialization() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut done = 0;
    let mut positive = 0;
    while done < TWO_TERMINAL_RUNS {
        let n = rng.gen_range(2..=8);
        let inst = random_instance(&mut rng, n, 0.35);
        if inst.terminals().len() != 2 {
            continue;
        }
        let lambda = lambda_for_ncp(&inst);
        let sol = solve_ncp_lambda(&inst, lambda, &SolveOptions::default()).map_err(|e| format!("run {done}: {e}"))?;
        let (value, cost) = min_cost_max_flow(&inst);
        let (v, c) =
            (multiflow_value(&sol.multiflow), multiflow_cost(&inst, &sol.multiflow).map_err(|e| e.to_string())?);
        if v != value || c != cost {
            return Err(format!("run {done}: value {v} cost {c}, flow LP gives {value} and {cost}"));
        }
        positive += value.is_positive() as usize;
        done += 1;
    }
    Ok(format!("{done} two-terminal instances, {positive} with positive flow"))
}

fn zero_flow_cases(runs: &[Run]) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut count = 0;
    let mut extra = Vec::new();
    for _ in 0..40 {
        let n = rng.gen_range(2..=6);
        let inst = random_instance(&mut rng, n, 0.3);
        let lambda = rng.gen_range(0..=2);
        let sol = solve_ncp_lambda(&inst, lambda, &SolveOptions::default()).map_err(|e| e.to_string())?;
        extra.push((inst, lambda, sol));
    }
    let all = runs.iter().map(|r| (&r.inst, r.lambda, &r.sol)).chain(extra.iter().map(|(i, l, s)| (i, *l, s)));
    for (inst, lambda, sol) in all {
        if !sol.certificates.zero_flow {
            continue;
        }
        let lam = int(lambda as i64);
        if !sol.multiflow.paths.is_empty() || !sol.phi.is_zero() {
            return Err(format!("lambda {lambda}: zero-flow case returned a nonzero flow"));
        }
        if !check_dual_feasible(&Network::from_instance(inst), &sol.dual.l, &lam)
            || !check_dual_feasible(&Network::from_instance(inst), &sol.l_hat, &lam)
        {
            return Err(format!("lambda {lambda}: zero-flow dual infeasible"));
        }
        count += 1;
    }
    if count == 0 {
        return Err("no zero-flow case was generated".into());
    }
    Ok(format!("{count} zero-flow cases with phi = 0 and feasible duals"))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let runs = pipeline_runs();
    let on_runs = |f: fn(&[Run]) -> Check| -> Check {
        match &runs {
            Ok(r) => f(r),
            Err(e) => Err(format!("pipeline failed: {e}")),
        }
    };
    let results: Vec<(&str, Check)> = vec![
        ("1 half-integer optimal primal", on_runs(half_integer_primal)),
        ("2 duality certificate", on_runs(duality_certificate)),
        ("3 half-integer dual", on_runs(half_integer_dual)),
        ("4 max flow equals min barrier", max_flow_min_barrier()),
        ("5 barrier canonicity", barrier_canonicity()),
        ("6 locked edges saturated", on_runs(saturation)),
        ("7 good flow decomposition", on_runs(decomposition)),
        ("8 two-terminal min-cost max-flow", two_terminal_specialization()),
        ("9 zero-flow cases", on_runs(zero_flow_cases)),
    ];
    let mut ok = true;
    for (name, r) in &results {
        match r {
            Ok(m) => println!("PASS criterion {name}: {m}"),
            Err(m) => {
                ok = false;
                println!("FAIL criterion {name}: {m}");
            }
        }
    }
    println!("acceptance finished in {:.1}s", start.elapsed().as_secs_f64());
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
