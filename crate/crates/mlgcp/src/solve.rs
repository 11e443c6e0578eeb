//! One-call solver front end shared by the CLI and the benchmark harness.

use std::time::Instant;

use thiserror::Error;

use crate::bnc::{bnc_solve, BncError, Limits, SolveStatus};
use crate::formulations::{build_eac, build_p3e, build_part, build_part2, BuiltModel};
use crate::graph::{CutSolution, LabelSet, LabeledGraph};
use crate::heuristics::{default_restarts, local_search};
use crate::oracle::{brute_force, OracleError, DEFAULT_LABEL_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Part,
    Part2,
    P3e,
    Eac,
    BruteForce,
    LocalSearch,
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "part" => Ok(Method::Part),
            "part2" => Ok(Method::Part2),
            "p3e" => Ok(Method::P3e),
            "eac" => Ok(Method::Eac),
            "bf" => Ok(Method::BruteForce),
            "ls" => Ok(Method::LocalSearch),
            other => Err(format!(
                "unknown model `{other}` (expected part, part2, p3e, eac, bf or ls)"
            )),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Part => "part",
            Method::Part2 => "part2",
            Method::P3e => "p3e",
            Method::Eac => "eac",
            Method::BruteForce => "bf",
            Method::LocalSearch => "ls",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub time_limit_s: f64,
    /// Seed the branch-and-cut with a local-search upper bound.
    pub heuristic_ub: bool,
    /// Seed for the local-search restarts.
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            time_limit_s: 3600.0,
            heuristic_ub: true,
            seed: 0,
        }
    }
}

/// Unified per-instance result across exact and heuristic methods.
#[derive(Debug)]
pub struct MethodReport {
    pub method: Method,
    pub best: Option<CutSolution>,
    pub lower_bound: f64,
    pub root_relaxation: Option<f64>,
    pub nodes: usize,
    pub cuts: usize,
    pub wall_time_s: f64,
    pub status: SolveStatus,
    /// True when the instance was disconnected and the empty cut returned.
    pub short_circuited: bool,
}

impl MethodReport {
    pub fn gap(&self) -> Option<f64> {
        let ub = self.best.as_ref()?.cost;
        if ub <= 0.0 {
            return None;
        }
        Some((100.0 * (ub - self.lower_bound) / ub).max(0.0))
    }

    pub fn gapr(&self) -> Option<f64> {
        let root = self.root_relaxation?;
        if self.lower_bound <= 0.0 {
            return None;
        }
        Some((100.0 * (self.lower_bound - root) / self.lower_bound).max(0.0))
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Bnc(#[from] BncError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

pub fn build_model(g: &LabeledGraph, method: Method) -> Option<BuiltModel> {
    match method {
        Method::Part => Some(build_part(g)),
        Method::Part2 => Some(build_part2(g)),
        Method::P3e => Some(build_p3e(g)),
        Method::Eac => Some(build_eac(g)),
        Method::BruteForce | Method::LocalSearch => None,
    }
}

/// Runs one method on one instance. Disconnected inputs short-circuit to the
/// empty cut for every method.
pub fn solve_instance(
    g: &LabeledGraph,
    method: Method,
    opts: &SolveOptions,
) -> Result<MethodReport, SolveError> {
    let start = Instant::now();
    if !g.is_connected() {
        let cut = g.validate_cut(&LabelSet::new()).expect("empty cut is valid");
        return Ok(MethodReport {
            method,
            best: Some(cut),
            lower_bound: 0.0,
            root_relaxation: None,
            nodes: 0,
            cuts: 0,
            wall_time_s: start.elapsed().as_secs_f64(),
            status: SolveStatus::Optimal,
            short_circuited: true,
        });
    }

    match method {
        Method::BruteForce => {
            let cut = brute_force(g, DEFAULT_LABEL_CAP)?;
            let cost = cut.cost;
            Ok(MethodReport {
                method,
                best: Some(cut),
                lower_bound: cost,
                root_relaxation: None,
                nodes: 0,
                cuts: 0,
                wall_time_s: start.elapsed().as_secs_f64(),
                status: SolveStatus::Optimal,
                short_circuited: false,
            })
        }
        Method::LocalSearch => {
            let out = local_search(g, default_restarts(g.num_vertices()), opts.seed);
            Ok(MethodReport {
                method,
                best: Some(out.best),
                lower_bound: 0.0,
                root_relaxation: None,
                nodes: 0,
                cuts: 0,
                wall_time_s: start.elapsed().as_secs_f64(),
                status: SolveStatus::TimeLimit, // heuristic: no optimality proof
                short_circuited: false,
            })
        }
        _ => {
            let built = build_model(g, method).expect("exact methods build a model");
            let initial = if opts.heuristic_ub {
                Some(local_search(g, default_restarts(g.num_vertices()), opts.seed).best)
            } else {
                None
            };
            let limits = Limits {
                time_limit_s: opts.time_limit_s,
                node_limit: usize::MAX,
            };
            let r = bnc_solve(&built.instance, &limits, initial)?;
            Ok(MethodReport {
                method,
                best: r.best,
                lower_bound: r.lower_bound,
                root_relaxation: r.root_relaxation,
                nodes: r.nodes,
                cuts: r.cuts,
                wall_time_s: start.elapsed().as_secs_f64(),
                status: r.status,
                short_circuited: false,
            })
        }
    }
}
