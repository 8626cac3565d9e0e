use std::fmt::Write as _;

use ncflow::dual::{check_dual_feasible, Network};
use ncflow::model::{
    check_multiflow, is_feasible, multiflow_cost, multiflow_value, objective_phi, validate_instance, weighted_sum,
    Instance,
};
use ncflow::oracle::{check_complementary_slackness, random_instance};
use ncflow::pipeline::{solve_ncp, solve_ncp_lambda, Certificates, PipelineError, Solution, SolveOptions};
use ncflow::rational::{int, is_half_integral, to_fraction_string};
use num_traits::Signed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::format::{parse_instance, write_instance, write_solution, ParseError, SolutionFile};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_INVALID: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("invalid instance:\n{0}")]
    Invalid(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Parse { .. } => EXIT_PARSE,
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Failed(_) => EXIT_FAILED,
        }
    }
}

pub fn read_file(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })
}

pub fn load_instance(path: &str) -> Result<Instance, CliError> {
    parse_instance(&read_file(path)?).map_err(|source| CliError::Parse { path: path.into(), source })
}

fn check_valid(inst: &Instance) -> Result<(), CliError> {
    let report = validate_instance(inst);
    if report.is_ok() {
        Ok(())
    } else {
        Err(CliError::Invalid(report.to_string()))
    }
}

/// Solves at `lambda` if given, else at the instance's own `lambda`, else
/// the min-cost maximum multiflow.
pub fn solve(inst: &Instance, lambda: Option<u64>, seed: Option<u64>) -> Result<Solution, CliError> {
    check_valid(inst)?;
    let opts = SolveOptions { seed };
    let res = match lambda.or(inst.lambda()) {
        Some(l) => solve_ncp_lambda(inst, l, &opts),
        None => solve_ncp(inst, &opts),
    };
    res.map_err(|e| match e {
        PipelineError::Invalid(r) => CliError::Invalid(r.to_string()),
        e => CliError::Failed(e.to_string()),
    })
}

pub fn solution_file(sol: &Solution) -> SolutionFile {
    SolutionFile {
        lambda: sol.lambda,
        multiflow: sol.multiflow.clone(),
        dual: sol.l_hat.clone(),
        objective: sol.phi.clone(),
    }
}

fn certificate_lines(inst: &Instance, sol: &Solution) -> Vec<String> {
    let c: &Certificates = &sol.certificates;
    let cost = multiflow_cost(inst, &sol.multiflow).expect("solver paths are valid");
    let mut out = vec![
        format!("phi = {}", to_fraction_string(&sol.phi)),
        format!("value = {}", to_fraction_string(&multiflow_value(&sol.multiflow))),
        format!("cost = {}", to_fraction_string(&cost)),
        format!("c.l = {}", to_fraction_string(&sol.dual.objective)),
        format!("c.l_hat = {}", to_fraction_string(&weighted_sum(&caps(inst), &sol.l_hat))),
    ];
    match &c.p {
        Some(p) => out.push(format!("p = {}", to_fraction_string(p))),
        None => out.push("p = inf".into()),
    }
    if c.zero_flow {
        out.push("zero flow: no T-path is short enough".into());
    } else {
        out.push(format!("H edges = {}, decomposition walks = {}", c.h_edges, c.decomposition_paths));
        out.push(format!("locked edges = {}", c.locked));
        if let Some((v, t)) = c.saturation {
            out.push(format!("saturation = {v}/{t}"));
        }
    }
    out
}

/// Solution text with a comment header summarizing the certificates.
pub fn render_solution(inst: &Instance, sol: &Solution) -> String {
    let mut out = String::new();
    for line in certificate_lines(inst, sol) {
        writeln!(out, "# {line}").unwrap();
    }
    out + &write_solution(&solution_file(sol), inst)
}

pub fn solution_json(inst: &Instance, sol: &Solution) -> Value {
    let name = |v: usize| inst.node(v).name.clone();
    let c = &sol.certificates;
    json!({
        "lambda": sol.lambda,
        "phi": to_fraction_string(&sol.phi),
        "value": to_fraction_string(&multiflow_value(&sol.multiflow)),
        "objective": to_fraction_string(&sol.phi),
        "paths": sol.multiflow.paths.iter().map(|p| json!({
            "weight": to_fraction_string(&p.weight),
            "nodes": p.nodes.iter().map(|&v| name(v)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "dual": (0..inst.num_nodes()).map(|v| (name(v), json!(to_fraction_string(&sol.l_hat[v])))).collect::<serde_json::Map<_, _>>(),
        "lp_dual": sol.dual.l.iter().map(to_fraction_string).collect::<Vec<_>>(),
        "certificates": {
            "zero_flow": c.zero_flow,
            "p": c.p.as_ref().map(to_fraction_string),
            "h_edges": c.h_edges,
            "decomposition_paths": c.decomposition_paths,
            "load_match": c.load_match,
            "locked": c.locked,
            "saturation": c.saturation.map(|(v, t)| json!({"value": v, "target": t})),
            "saturation_optimal": c.saturation_optimal,
        },
    })
}

fn caps(inst: &Instance) -> Vec<u64> {
    inst.nodes().iter().map(|n| n.cap).collect()
}

/// Outcome of each independent check on a claimed solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub checks: Vec<(&'static str, Result<(), String>)>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, r)| r.is_ok())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (name, r) in &self.checks {
            match r {
                Ok(()) => writeln!(out, "  ok    {name}").unwrap(),
                Err(m) => writeln!(out, "  FAIL  {name}: {m}").unwrap(),
            }
        }
        out
    }

    pub fn json(&self) -> Value {
        json!({
            "ok": self.passed(),
            "checks": self.checks.iter().map(|(name, r)| json!({
                "check": name,
                "ok": r.is_ok(),
                "message": r.as_ref().err(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Re-checks a claimed solution from scratch.
pub fn verify(inst: &Instance, sol: &SolutionFile) -> VerifyReport {
    let lam = int(sol.lambda as i64);
    let f = &sol.multiflow;
    let l = &sol.dual;
    let mut checks = Vec::new();

    let paths_ok = check_multiflow(inst, f).map_err(|e| e.to_string());
    let paths_valid = paths_ok.is_ok();
    checks.push(("t-paths", paths_ok));
    checks.push((
        "capacities",
        if paths_valid && is_feasible(inst, f) {
            Ok(())
        } else {
            Err("node capacity exceeded or invalid paths".into())
        },
    ));
    let bad_weight = f.paths.iter().find(|p| !is_half_integral(&p.weight) || p.weight.is_negative());
    let bad_dual = (0..l.len()).find(|&v| !is_half_integral(&l[v]) || l[v].is_negative());
    checks.push((
        "half-integrality",
        match (bad_weight, bad_dual) {
            (Some(p), _) => Err(format!("weight {} is not a nonnegative half-integer", p.weight)),
            (_, Some(v)) => Err(format!("length of {} is not a nonnegative half-integer", inst.node(v).name)),
            _ => Ok(()),
        },
    ));
    checks.push((
        "dual feasibility",
        if check_dual_feasible(&Network::from_instance(inst), l, &lam) {
            Ok(())
        } else {
            Err("some terminal pair is closer than lambda".into())
        },
    ));
    let duality = if paths_valid {
        let phi = objective_phi(inst, f, &lam);
        let cl = weighted_sum(&caps(inst), l);
        if phi == cl && cl == sol.objective {
            Ok(())
        } else {
            Err(format!("phi = {phi}, c.l = {cl}, claimed objective = {}", sol.objective))
        }
    } else {
        Err("paths are invalid".into())
    };
    checks.push(("duality", duality));
    checks.push((
        "complementary slackness",
        if paths_valid { check_complementary_slackness(inst, f, l, &lam) } else { Err("paths are invalid".into()) },
    ));
    VerifyReport { checks }
}

pub fn generate(seed: u64, nodes: usize, extra_edge_prob: f64, lambda: Option<u64>) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = random_instance(&mut rng, nodes, extra_edge_prob).with_lambda(lambda);
    format!("# generated: seed {seed}, {nodes} nodes\n{}", write_instance(&inst))
}
