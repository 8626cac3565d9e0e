use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ncflow::bdgraph::HForm;
use ncflow::model::lambda_for_ncp;
use ncflow_cli::commands::{
    generate, load_instance, read_file, render_solution, solution_json, solve, verify, CliError, VerifyReport,
    EXIT_FAILED, EXIT_OK,
};
use ncflow_cli::dump::dump_h;
use ncflow_cli::format::parse_solution;
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "ncflow", version, about = "Min-cost maximum free multiflows with half-integer certificates")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and print the multiflow, rounded lengths and objective.
    Solve {
        instance: PathBuf,
        /// Maximize lambda*value - cost at this lambda instead of the instance's.
        #[arg(long)]
        lambda: Option<u64>,
        /// Write the solution here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Randomize the augmentation order of the saturation check.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check solutions against their instances: INSTANCE SOLUTION [INSTANCE SOLUTION ...].
    Verify {
        #[arg(required = true, num_args = 2..)]
        files: Vec<PathBuf>,
        /// Worker threads for batches.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Print a random instance.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(2..))]
        nodes: u64,
        /// Probability of each edge beyond the spanning tree.
        #[arg(long, default_value_t = 0.3)]
        extra_edges: f64,
        #[arg(long)]
        lambda: Option<u64>,
    },
    /// Print the auxiliary bidirected graph for the optimal lengths.
    DumpH {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Form::Compact)]
        form: Form,
        #[arg(long)]
        lambda: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Form {
    Compact,
    Expensive,
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn run_solve(
    json: bool,
    instance: &Path,
    lambda: Option<u64>,
    output: Option<PathBuf>,
    seed: Option<u64>,
) -> Result<u8, CliError> {
    let inst = load_instance(&path_str(instance))?;
    let sol = solve(&inst, lambda, seed)?;
    let text = if json { format!("{:#}\n", solution_json(&inst, &sol)) } else { render_solution(&inst, &sol) };
    match output {
        Some(p) => std::fs::write(&p, text).map_err(|source| CliError::Io { path: path_str(&p), source })?,
        None => print!("{text}"),
    }
    Ok(EXIT_OK)
}

fn verify_pair(inst_path: &Path, sol_path: &Path) -> Result<VerifyReport, CliError> {
    let inst = load_instance(&path_str(inst_path))?;
    let sol = parse_solution(&read_file(&path_str(sol_path))?, &inst)
        .map_err(|source| CliError::Parse { path: path_str(sol_path), source })?;
    Ok(verify(&inst, &sol))
}

fn run_verify(json: bool, files: &[PathBuf], jobs: usize) -> Result<u8, CliError> {
    if !files.len().is_multiple_of(2) {
        return Err(CliError::Failed("verify takes instance/solution pairs".into()));
    }
    let pairs: Vec<(&PathBuf, &PathBuf)> = files.chunks(2).map(|c| (&c[0], &c[1])).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Failed(e.to_string()))?;
    let results: Vec<_> = pool.install(|| pairs.par_iter().map(|(i, s)| verify_pair(i, s)).collect());

    let mut code = EXIT_OK;
    let mut entries = Vec::new();
    let mut stdout = std::io::stdout().lock();
    for ((i, s), r) in pairs.iter().zip(results) {
        let report = match r {
            Ok(rep) => rep,
            Err(e) => {
                // Parse and IO failures take precedence over check failures.
                code = code.max(e.exit_code());
                if json {
                    entries.push(
                        serde_json::json!({"instance": path_str(i), "solution": path_str(s), "error": e.to_string()}),
                    );
                } else {
                    writeln!(stdout, "{} {}: error: {e}", path_str(i), path_str(s)).ok();
                }
                continue;
            }
        };
        if !report.passed() && code == EXIT_OK {
            code = EXIT_FAILED;
        }
        if json {
            let mut v = report.json();
            v["instance"] = path_str(i).into();
            v["solution"] = path_str(s).into();
            entries.push(v);
        } else {
            let verdict = if report.passed() { "PASS" } else { "FAIL" };
            writeln!(stdout, "{} {}: {verdict}\n{}", path_str(i), path_str(s), report.render()).ok();
        }
    }
    if json {
        writeln!(stdout, "{:#}", serde_json::Value::Array(entries)).ok();
    }
    Ok(code)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Solve { instance, lambda, output, seed } => run_solve(cli.json, &instance, lambda, output, seed),
        Command::Verify { files, jobs } => run_verify(cli.json, &files, jobs),
        Command::Gen { seed, nodes, extra_edges, lambda } => {
            print!("{}", generate(seed, nodes as usize, extra_edges.clamp(0.0, 1.0), lambda));
            Ok(EXIT_OK)
        }
        Command::DumpH { instance, form, lambda } => {
            let inst = load_instance(&path_str(&instance))?;
            let lambda = lambda.or(inst.lambda()).unwrap_or_else(|| lambda_for_ncp(&inst));
            let form = match form {
                Form::Compact => HForm::Compact,
                Form::Expensive => HForm::Expensive,
            };
            print!("{}", dump_h(&inst, lambda, form)?);
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
