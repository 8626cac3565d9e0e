//! Line-oriented text formats.
//!
//! Instance files:
//!
//! ```text
//! node <name> cap <int> cost <int> [terminal]
//! edge <name> <name>
//! lambda <int>
//! ```
//!
//! Solution files:
//!
//! ```text
//! lambda <int>
//! path <p>/<q> <node> <node> ...
//! dual <node> <p>/<q>
//! objective <p>/<q>
//! ```
//!
//! Everything after `#` on a line is ignored, as are blank lines.

use std::collections::HashMap;
use std::fmt::Write as _;

use ncflow::model::{FlowPath, Instance, Multiflow, Node};
use ncflow::rational::{parse_rational, to_fraction_string, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, msg: msg.into() })
}

fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = body.split_whitespace().collect();
        (!words.is_empty()).then_some((i + 1, words))
    })
}

fn parse_int(line: usize, s: &str) -> Result<u64, ParseError> {
    s.parse().or_else(|_| err(line, format!("expected a nonnegative integer, found `{s}`")))
}

fn parse_frac(line: usize, s: &str) -> Result<Rational, ParseError> {
    parse_rational(s).or_else(|_| err(line, format!("expected a fraction p/q, found `{s}`")))
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut nodes: Vec<Node> = Vec::new();
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut lambda = None;
    for (ln, w) in lines(text) {
        match w[0] {
            "node" => {
                let terminal = match w.len() {
                    6 => false,
                    7 if w[6] == "terminal" => true,
                    _ => return err(ln, "expected `node <name> cap <int> cost <int> [terminal]`"),
                };
                if w[2] != "cap" || w[4] != "cost" {
                    return err(ln, "expected `node <name> cap <int> cost <int> [terminal]`");
                }
                let name = w[1].to_string();
                if ids.contains_key(&name) {
                    return err(ln, format!("duplicate node `{name}`"));
                }
                ids.insert(name.clone(), nodes.len());
                nodes.push(Node { name, cap: parse_int(ln, w[3])?, cost: parse_int(ln, w[5])?, terminal });
            }
            "edge" => {
                if w.len() != 3 {
                    return err(ln, "expected `edge <name> <name>`");
                }
                let id = |s: &str| {
                    ids.get(s).copied().ok_or_else(|| ParseError { line: ln, msg: format!("unknown node `{s}`") })
                };
                edges.push((id(w[1])?, id(w[2])?));
            }
            "lambda" => {
                if w.len() != 2 || lambda.is_some() {
                    return err(ln, "expected a single `lambda <int>` line");
                }
                lambda = Some(parse_int(ln, w[1])?);
            }
            other => return err(ln, format!("unknown keyword `{other}`")),
        }
    }
    Ok(Instance::new(nodes, edges, lambda))
}

pub fn write_instance(inst: &Instance) -> String {
    let mut out = String::new();
    for n in inst.nodes() {
        let t = if n.terminal { " terminal" } else { "" };
        writeln!(out, "node {} cap {} cost {}{t}", n.name, n.cap, n.cost).unwrap();
    }
    for &(u, v) in inst.edges() {
        writeln!(out, "edge {} {}", inst.node(u).name, inst.node(v).name).unwrap();
    }
    if let Some(l) = inst.lambda() {
        writeln!(out, "lambda {l}").unwrap();
    }
    out
}

/// A multiflow with node lengths and the claimed objective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionFile {
    pub lambda: u64,
    pub multiflow: Multiflow,
    /// One length per node; nodes without a `dual` line get 0.
    pub dual: Vec<Rational>,
    pub objective: Rational,
}

pub fn parse_solution(text: &str, inst: &Instance) -> Result<SolutionFile, ParseError> {
    let mut lambda = None;
    let mut objective = None;
    let mut paths = Vec::new();
    let mut dual = vec![Rational::default(); inst.num_nodes()];
    let id = |ln: usize, s: &str| {
        inst.node_by_name(s).ok_or_else(|| ParseError { line: ln, msg: format!("unknown node `{s}`") })
    };
    for (ln, w) in lines(text) {
        match w[0] {
            "lambda" if w.len() == 2 => lambda = Some(parse_int(ln, w[1])?),
            "objective" if w.len() == 2 => objective = Some(parse_frac(ln, w[1])?),
            "path" if w.len() >= 4 => {
                let weight = parse_frac(ln, w[1])?;
                let nodes = w[2..].iter().map(|s| id(ln, s)).collect::<Result<_, _>>()?;
                paths.push(FlowPath { nodes, weight });
            }
            "dual" if w.len() == 3 => dual[id(ln, w[1])?] = parse_frac(ln, w[2])?,
            other => return err(ln, format!("malformed `{other}` line")),
        }
    }
    let lambda = lambda.ok_or(ParseError { line: 0, msg: "missing `lambda` line".into() })?;
    let objective = objective.ok_or(ParseError { line: 0, msg: "missing `objective` line".into() })?;
    Ok(SolutionFile { lambda, multiflow: Multiflow { paths }, dual, objective })
}

pub fn write_solution(sol: &SolutionFile, inst: &Instance) -> String {
    let mut out = String::new();
    writeln!(out, "lambda {}", sol.lambda).unwrap();
    for p in &sol.multiflow.paths {
        let names: Vec<&str> = p.nodes.iter().map(|&v| inst.node(v).name.as_str()).collect();
        writeln!(out, "path {} {}", to_fraction_string(&p.weight), names.join(" ")).unwrap();
    }
    for (v, x) in sol.dual.iter().enumerate() {
        writeln!(out, "dual {} {}", inst.node(v).name, to_fraction_string(x)).unwrap();
    }
    writeln!(out, "objective {}", to_fraction_string(&sol.objective)).unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ncflow::rational::{frac, int};

    const STAR: &str = "\
# star
node v cap 1 cost 1
node s1 cap 2 cost 1 terminal
node s2 cap 2 cost 1 terminal
node s3 cap 2 cost 1 terminal
edge s1 v
edge s2 v   # trailing comment
edge s3 v
lambda 10
";

    #[test]
    fn instance_round_trip() {
        let inst = parse_instance(STAR).unwrap();
        assert_eq!(inst.num_nodes(), 4);
        assert_eq!(inst.lambda(), Some(10));
        assert_eq!(parse_instance(&write_instance(&inst)).unwrap(), inst);
    }

    #[test]
    fn malformed_lines() {
        for bad in ["node a cap 1", "edge a b", "node a cap x cost 1", "frob", "node a cap 1 cost 1 term"] {
            assert!(parse_instance(bad).is_err(), "{bad}");
        }
        let e = parse_instance("node a cap 1 cost 1\nnode a cap 1 cost 1").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn solution_round_trip() {
        let inst = parse_instance(STAR).unwrap();
        let sol = SolutionFile {
            lambda: 10,
            multiflow: Multiflow { paths: vec![FlowPath { nodes: vec![1, 0, 2], weight: frac(1, 2) }] },
            dual: vec![int(7), int(0), frac(1, 2), int(0)],
            objective: int(7),
        };
        let text = write_solution(&sol, &inst);
        assert!(text.contains("path 1/2 s1 v s2"));
        assert_eq!(parse_solution(&text, &inst).unwrap(), sol);
    }
}
