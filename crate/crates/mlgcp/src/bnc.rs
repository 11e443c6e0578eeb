//! Branch-and-bound / branch-and-cut driver.
//!
//! Best-bound node selection with depth-first tie-breaking, lazy separation
//! at integral points, fractional separation at the root (then every 10th
//! node), and a global cut pool. Single-threaded and deterministic.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use thiserror::Error;

use crate::graph::CutSolution;
use crate::lp::{lp_solve, LpError, LpProblem, LpRow, LpStatus, INT_TOL};

pub type SeparateFn = Box<dyn Fn(&[f64]) -> Vec<LpRow> + Send + Sync>;
pub type ExtractFn = Box<dyn Fn(&[f64]) -> CutSolution + Send + Sync>;

/// A formulation bound to the engine: LP core, integrality information and
/// separation callbacks.
pub struct ModelInstance {
    pub problem: LpProblem,
    pub integer_vars: Vec<usize>,
    pub branch_priority: Vec<usize>,
    /// Enables the ceil() bound strengthening used when all label costs are
    /// integral.
    pub costs_integral: bool,
    /// Called at integral points; must return rows violated by the point, or
    /// nothing when the point is feasible.
    pub separate_integer: SeparateFn,
    /// Called at fractional points (root, then every 10th node).
    pub separate_fractional: SeparateFn,
    pub extract_solution: ExtractFn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    TimeLimit,
    Infeasible,
}

#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub time_limit_s: f64,
    pub node_limit: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            time_limit_s: 3600.0,
            node_limit: usize::MAX,
        }
    }
}

#[derive(Debug)]
pub struct SolveReport {
    pub best: Option<CutSolution>,
    /// LP-space values of the incumbent, for structural post-checks.
    pub best_values: Option<Vec<f64>>,
    pub lower_bound: f64,
    pub root_relaxation: Option<f64>,
    pub nodes: usize,
    pub cuts: usize,
    pub wall_time_s: f64,
    pub status: SolveStatus,
    /// Every separator-emitted row, in emission order.
    pub cut_rows: Vec<LpRow>,
}

impl SolveReport {
    /// 100 * (UB - LB) / UB, clamped at 0. None without a positive UB.
    pub fn gap(&self) -> Option<f64> {
        let ub = self.best.as_ref()?.cost;
        if ub <= 0.0 {
            return None;
        }
        Some((100.0 * (ub - self.lower_bound) / ub).max(0.0))
    }

    /// 100 * (LB - root) / LB, clamped at 0. None without a positive LB or
    /// without a root relaxation value.
    pub fn gapr(&self) -> Option<f64> {
        let root = self.root_relaxation?;
        if self.lower_bound <= 0.0 {
            return None;
        }
        Some((100.0 * (self.lower_bound - root) / self.lower_bound).max(0.0))
    }
}

#[derive(Debug, Error)]
pub enum BncError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("engine fault: {0}")]
    EngineFault(String),
}

struct Node {
    bound: f64,
    depth: usize,
    id: usize,
    fixes: Vec<(usize, f64)>, // binary variable fixings along the path
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // BinaryHeap is a max-heap; invert so that pop() yields the lowest
    // bound, then the deepest node, then the most recently created.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(self.id.cmp(&other.id))
    }
}

enum NodeOutcome {
    Pruned,
    Incumbent(CutSolution, Vec<f64>),
    Branched(Vec<Node>),
}

pub fn bnc_solve(
    m: &ModelInstance,
    limits: &Limits,
    initial_ub: Option<CutSolution>,
) -> Result<SolveReport, BncError> {
    let start = Instant::now();
    let mut problem = m.problem.clone();
    let base_bounds = problem.bounds.clone();

    let mut best = initial_ub;
    let mut best_values: Option<Vec<f64>> = None;
    let mut ub = best.as_ref().map_or(f64::INFINITY, |c| c.cost);
    let mut cut_rows: Vec<LpRow> = Vec::new();
    let mut nodes = 0usize;
    let mut cuts = 0usize;
    let mut root_relaxation = None;
    let mut next_id = 1usize;

    let mut heap = BinaryHeap::new();
    heap.push(Node {
        bound: 0.0, // nonnegative objectives in every MLGCP formulation
        depth: 0,
        id: 0,
        fixes: Vec::new(),
    });

    let mut lower_bound = 0.0f64;
    let mut hit_limit = false;

    while let Some(node) = heap.pop() {
        lower_bound = lower_bound.max(node.bound.min(ub));
        if node.bound >= ub - 1e-6 {
            continue; // bound learned before this node was reached
        }
        if start.elapsed().as_secs_f64() >= limits.time_limit_s || nodes >= limits.node_limit {
            hit_limit = true; // the popped node stays open; its bound is the global LB
            break;
        }
        nodes += 1;

        let outcome = process_node(
            m,
            &mut problem,
            &base_bounds,
            &node,
            ub,
            nodes,
            start,
            limits,
            &mut cuts,
            &mut cut_rows,
            &mut root_relaxation,
        )?;
        match outcome {
            NodeOutcome::Pruned => {}
            NodeOutcome::Incumbent(cut, values) => {
                if cut.cost < ub - 1e-9 {
                    ub = cut.cost;
                    best = Some(cut);
                    best_values = Some(values);
                }
            }
            NodeOutcome::Branched(children) => {
                for mut child in children {
                    child.id = next_id;
                    next_id += 1;
                    heap.push(child);
                }
            }
        }
    }

    let status = if hit_limit {
        SolveStatus::TimeLimit
    } else if best.is_some() {
        lower_bound = ub;
        SolveStatus::Optimal
    } else {
        SolveStatus::Infeasible
    };
    Ok(SolveReport {
        best,
        best_values,
        lower_bound: lower_bound.min(ub),
        root_relaxation,
        nodes,
        cuts,
        wall_time_s: start.elapsed().as_secs_f64(),
        status,
        cut_rows,
    })
}

#[allow(clippy::too_many_arguments)]
fn process_node(
    m: &ModelInstance,
    problem: &mut LpProblem,
    base_bounds: &[(f64, f64)],
    node: &Node,
    ub: f64,
    node_number: usize,
    start: Instant,
    limits: &Limits,
    cuts: &mut usize,
    cut_rows: &mut Vec<LpRow>,
    root_relaxation: &mut Option<f64>,
) -> Result<NodeOutcome, BncError> {
    problem.bounds.copy_from_slice(base_bounds);
    for &(var, val) in &node.fixes {
        problem.bounds[var] = (val, val);
    }
    let is_root = node.id == 0;
    let frac_sep_here = is_root || node_number % 10 == 0;

    loop {
        let sol = lp_solve(problem)?;
        if sol.status == LpStatus::Infeasible {
            if is_root {
                *root_relaxation = None;
            }
            return Ok(NodeOutcome::Pruned);
        }
        if is_root {
            *root_relaxation = Some(sol.objective);
        }
        let bound = strengthen(m, sol.objective);
        if bound >= ub - 1e-6 {
            return Ok(NodeOutcome::Pruned);
        }

        let fractional = most_fractional(m, &sol.values);
        if fractional.is_none() {
            let rows = (m.separate_integer)(&sol.values);
            if !rows.is_empty() {
                add_checked(problem, rows, &sol.values, cuts, cut_rows)?;
                if start.elapsed().as_secs_f64() >= limits.time_limit_s {
                    return Ok(NodeOutcome::Pruned); // limit noticed; tree stops next pop
                }
                continue;
            }
            let cut = (m.extract_solution)(&sol.values);
            if !cut.is_feasible() {
                return Err(BncError::EngineFault(format!(
                    "extracted solution is infeasible ({} components)",
                    cut.components_after
                )));
            }
            if (cut.cost - sol.objective).abs() > 1e-6 {
                return Err(BncError::EngineFault(format!(
                    "extracted cost {} disagrees with LP objective {}",
                    cut.cost, sol.objective
                )));
            }
            return Ok(NodeOutcome::Incumbent(cut, sol.values));
        }

        if frac_sep_here {
            let rows = (m.separate_fractional)(&sol.values);
            if !rows.is_empty() {
                add_checked(problem, rows, &sol.values, cuts, cut_rows)?;
                if start.elapsed().as_secs_f64() >= limits.time_limit_s {
                    return Ok(NodeOutcome::Pruned);
                }
                continue;
            }
        }

        let var = fractional.expect("checked above");
        let children = vec![
            Node {
                bound,
                depth: node.depth + 1,
                id: 0,
                fixes: with_fix(&node.fixes, var, 0.0),
            },
            Node {
                bound,
                depth: node.depth + 1,
                id: 0,
                fixes: with_fix(&node.fixes, var, 1.0),
            },
        ];
        return Ok(NodeOutcome::Branched(children));
    }
}

fn with_fix(fixes: &[(usize, f64)], var: usize, val: f64) -> Vec<(usize, f64)> {
    let mut out = fixes.to_vec();
    out.push((var, val));
    out
}

fn strengthen(m: &ModelInstance, obj: f64) -> f64 {
    if m.costs_integral {
        (obj - INT_TOL).ceil().max(0.0)
    } else {
        obj
    }
}

/// Most fractional integer variable, searched in the branch-priority set
/// first; ties go to the lowest index. None when integral.
fn most_fractional(m: &ModelInstance, values: &[f64]) -> Option<usize> {
    let pick = |vars: &[usize]| -> Option<usize> {
        let mut best: Option<(f64, usize)> = None;
        for &v in vars {
            let frac = (values[v] - values[v].round()).abs();
            if frac > INT_TOL && best.map_or(true, |(bf, _)| frac > bf + 1e-15) {
                best = Some((frac, v));
            }
        }
        best.map(|(_, v)| v)
    };
    pick(&m.branch_priority).or_else(|| pick(&m.integer_vars))
}

fn add_checked(
    problem: &mut LpProblem,
    rows: Vec<LpRow>,
    point: &[f64],
    cuts: &mut usize,
    cut_rows: &mut Vec<LpRow>,
) -> Result<(), BncError> {
    for row in &rows {
        if row.violation(point) <= 1e-7 {
            return Err(BncError::EngineFault(
                "separator returned a row not violated by the queried point".into(),
            ));
        }
    }
    *cuts += rows.len();
    cut_rows.extend(rows.iter().cloned());
    problem.rows.extend(rows);
    Ok(())
}
