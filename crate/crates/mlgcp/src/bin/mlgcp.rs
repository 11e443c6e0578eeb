use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mlgcp::bench::{rows_to_csv, rows_to_table, BenchSpec};
use mlgcp::bnc::SolveStatus;
use mlgcp::gen::{generate, InstanceSpec, Scenario};
use mlgcp::graph::{
    parse_instance, parse_solution, serialize_instance, serialize_solution, LabeledGraph,
};
use mlgcp::solve::{solve_instance, Method, SolveOptions};

#[derive(Parser)]
#[command(name = "mlgcp", about = "Minimum labeling global cut solvers", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance with a chosen method
    Solve {
        /// Model: part, part2, p3e, eac, bf (brute force) or ls (local search)
        #[arg(long, default_value = "part2")]
        model: Method,
        /// Time limit in seconds for branch-and-cut
        #[arg(long, default_value_t = 3600.0)]
        time_limit: f64,
        /// Seed for the local-search heuristic
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Do not seed branch-and-cut with a local-search upper bound
        #[arg(long)]
        no_heuristic: bool,
        /// Write the solution file here
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print extra solver details
        #[arg(long)]
        verbose: bool,
        /// Instance file
        instance: PathBuf,
    },
    /// Generate a random connected instance
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        labels: usize,
        #[arg(long)]
        density: f64,
        /// unicost, random or normal
        #[arg(long, default_value = "unicost")]
        scenario: Scenario,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark sweep over generated instance groups
    Bench {
        /// Vertex counts, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Label counts, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        labels: Vec<usize>,
        /// Densities, comma separated
        #[arg(long, value_delimiter = ',', default_values_t = [0.2, 0.5, 0.8])]
        density: Vec<f64>,
        #[arg(long, default_value = "unicost")]
        scenario: Scenario,
        /// Instances per group
        #[arg(long, default_value_t = 10)]
        instances: usize,
        /// First instance seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Models to compare, comma separated
        #[arg(long, value_delimiter = ',', default_values_t = [Method::Part2, Method::Eac])]
        models: Vec<Method>,
        #[arg(long, default_value_t = 3600.0)]
        time_limit: f64,
        /// Parallel instance workers (each solve stays single-threaded)
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        no_heuristic: bool,
        /// Write the CSV results here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a solution file against an instance
    Validate {
        instance: PathBuf,
        solution: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn read_instance(path: &PathBuf) -> Result<LabeledGraph, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let parsed = parse_instance(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    for w in &parsed.warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(parsed.graph)
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Solve {
            model,
            time_limit,
            seed,
            no_heuristic,
            out,
            verbose,
            instance,
        } => {
            let g = read_instance(&instance)?;
            let opts = SolveOptions {
                time_limit_s: time_limit,
                heuristic_ub: !no_heuristic,
                seed,
            };
            let r = solve_instance(&g, model, &opts).map_err(|e| e.to_string())?;
            let status = match r.status {
                SolveStatus::Optimal => "optimal",
                SolveStatus::TimeLimit => "time_limit",
                SolveStatus::Infeasible => "infeasible",
            };
            let fmt_opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.2}"));
            match &r.best {
                Some(cut) => {
                    let labels: Vec<String> =
                        cut.labels.iter().map(|l| l.to_string()).collect();
                    println!("cost {}", cut.cost);
                    println!("labels {}", labels.join(" "));
                }
                None => println!("no solution"),
            }
            println!(
                "status {status}  t(s) {:.3}  gap {}  gapr {}  nodes {}  cuts {}",
                r.wall_time_s,
                fmt_opt(r.gap()),
                fmt_opt(r.gapr()),
                r.nodes,
                r.cuts
            );
            if verbose {
                println!("lower_bound {}", r.lower_bound);
                if let Some(root) = r.root_relaxation {
                    println!("root_relaxation {root}");
                }
                if r.short_circuited {
                    println!("note: disconnected input, empty cut is optimal");
                }
            }
            if let (Some(path), Some(cut)) = (&out, &r.best) {
                std::fs::write(path, serialize_solution(cut))
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Generate {
            n,
            labels,
            density,
            scenario,
            seed,
            out,
        } => {
            let g = generate(&InstanceSpec {
                n,
                num_labels: labels,
                density,
                scenario,
                seed,
            })
            .map_err(|e| e.to_string())?;
            let text = serialize_instance(&g);
            match out {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench {
            n,
            labels,
            density,
            scenario,
            instances,
            seed,
            models,
            time_limit,
            jobs,
            no_heuristic,
            out,
        } => {
            let spec = BenchSpec {
                ns: n,
                labels,
                densities: density,
                scenario,
                seeds: (0..instances as u64).map(|i| seed + i).collect(),
                models,
                time_limit_s: time_limit,
                heuristic_ub: !no_heuristic,
                jobs,
            };
            let rows = mlgcp::bench::run_bench(&spec);
            print!("{}", rows_to_table(&rows));
            let csv = rows_to_csv(&rows);
            if let Some(path) = out {
                std::fs::write(&path, &csv)
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            } else {
                print!("{csv}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { instance, solution } => {
            let g = read_instance(&instance)?;
            let text = std::fs::read_to_string(&solution)
                .map_err(|e| format!("cannot read {}: {e}", solution.display()))?;
            let (claimed, labels) =
                parse_solution(&text).map_err(|e| format!("{}: {e}", solution.display()))?;
            let cut = g.validate_cut(&labels).map_err(|e| e.to_string())?;
            if !cut.is_feasible() {
                eprintln!(
                    "infeasible: removal leaves {} component(s)",
                    cut.components_after
                );
                return Ok(ExitCode::FAILURE);
            }
            if (cut.cost - claimed).abs() > 1e-9 {
                eprintln!("cost mismatch: claimed {claimed}, recomputed {}", cut.cost);
                return Ok(ExitCode::from(2));
            }
            println!("ok: feasible, cost {}", cut.cost);
            Ok(ExitCode::SUCCESS)
        }
    }
}
