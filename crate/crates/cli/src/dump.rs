//! Plain-text dump of the auxiliary bidirected graph `H`.
//!
//! ```text
//! h <compact|expensive> source <id> nodes <count> edges <count>
//! node <id> <role>
//! edge <id> <node><mark> <node><mark> cap <int> <role>
//! ```
//!
//! `<mark>` is `+` when the edge leaves that end and `-` when it enters it.
//! Node roles are `source`, `root`, `plain`, `entry:<v>`, `exit:<v>`,
//! `hub:<v>:<copy>` and `port:<v>:<terminal>`. Edge roles are `node:<v>`,
//! `radial:<a>-<b>`, `crossing:<a>-<b>`, `leg:<v>:<copy>:<terminal>`,
//! `loop:<v>:<copy>`, `source-arc:<terminal>` and `plain`, where `<v>`,
//! `<a>`, `<b>` and `<terminal>` are node names of the instance.

use std::fmt::Write as _;

use ncflow::bdgraph::{build_h, AuxGraph, Dir, EdgeRole, HForm, NodeRole};
use ncflow::dual::{solve_dual, Network};
use ncflow::geodesic::{geodesic_structure, GeodesicOutcome};
use ncflow::model::Instance;
use ncflow::rational::int;

use crate::commands::CliError;

pub fn render_h(inst: &Instance, aux: &AuxGraph) -> String {
    let g = &aux.graph;
    let name = |v: usize| inst.node(v).name.as_str();
    let term = |k: usize| name(aux.terminals[k]);
    let edge = |e: usize| {
        let (a, b) = inst.edges()[e];
        format!("{}-{}", name(a), name(b))
    };
    let form = match aux.form {
        HForm::Compact => "compact",
        HForm::Expensive => "expensive",
    };
    let mut out = String::new();
    writeln!(out, "h {form} source {} nodes {} edges {}", g.source, g.num_nodes(), g.edges.len()).unwrap();
    for (i, role) in g.roles.iter().enumerate() {
        let r = match *role {
            NodeRole::Source => "source".to_string(),
            NodeRole::Root => "root".to_string(),
            NodeRole::Plain => "plain".to_string(),
            NodeRole::Entry(v) => format!("entry:{}", name(v)),
            NodeRole::Exit(v) => format!("exit:{}", name(v)),
            NodeRole::Hub { w, copy } => format!("hub:{}:{copy}", name(w)),
            NodeRole::Port { w, k } => format!("port:{}:{}", name(w), term(k)),
        };
        writeln!(out, "node {i} {r}").unwrap();
    }
    let mark = |d: Dir| if d == Dir::Leave { '+' } else { '-' };
    for (i, e) in g.edges.iter().enumerate() {
        let r = match e.role {
            EdgeRole::NodeEdge(v) => format!("node:{}", name(v)),
            EdgeRole::Radial(x) => format!("radial:{}", edge(x)),
            EdgeRole::Crossing(x) => format!("crossing:{}", edge(x)),
            EdgeRole::Leg { w, copy, k } => format!("leg:{}:{copy}:{}", name(w), term(k)),
            EdgeRole::HubLoop { w, copy } => format!("loop:{}:{copy}", name(w)),
            EdgeRole::SourceArc(k) => format!("source-arc:{}", term(k)),
            _ => "plain".to_string(),
        };
        let [(a, da), (b, db)] = e.ends;
        writeln!(out, "edge {i} {a}{} {b}{} cap {} {r}", mark(da), mark(db), e.cap).unwrap();
    }
    out
}

/// Builds `H` for the optimal lengths at `lambda` with the instance capacities.
pub fn dump_h(inst: &Instance, lambda: u64, form: HForm) -> Result<String, CliError> {
    let lam = int(lambda as i64);
    let dual = solve_dual(&Network::from_instance(inst), &lam).map_err(|e| CliError::Failed(e.to_string()))?;
    match geodesic_structure(inst, &dual.l, &lam).map_err(|e| CliError::Failed(e.to_string()))? {
        GeodesicOutcome::ZeroFlow { .. } => Err(CliError::Failed("no T-path is short enough; H is empty".into())),
        GeodesicOutcome::Structure(gs) => {
            let caps: Vec<u64> = inst.nodes().iter().map(|n| n.cap).collect();
            Ok(render_h(inst, &build_h(inst, &gs, &caps, form)))
        }
    }
}
