//! Benchmark sweeps over generated instance groups, with per-group mean
//! metrics (UB, optimal count, time, gap, gapr) in CSV and aligned text.

use std::fmt::Write as _;
use std::sync::Mutex;

use crate::bnc::SolveStatus;
use crate::gen::{generate, InstanceSpec, Scenario};
use crate::solve::{solve_instance, Method, SolveOptions};

#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub ns: Vec<usize>,
    pub labels: Vec<usize>,
    pub densities: Vec<f64>,
    pub scenario: Scenario,
    pub seeds: Vec<u64>,
    pub models: Vec<Method>,
    pub time_limit_s: f64,
    pub heuristic_ub: bool,
    pub jobs: usize,
}

/// One row of the results table: a (group, model) pair aggregated over the
/// group's instances.
#[derive(Debug, Clone)]
pub struct GroupRow {
    pub group: String,
    pub model: Method,
    pub mean_ub: f64,
    pub optimal: usize,
    pub mean_time_s: f64,
    pub mean_gap: f64,
    pub mean_gapr: f64,
    pub mean_nodes: f64,
    pub mean_cuts: f64,
    pub failures: usize,
}

pub fn group_name(n: usize, num_labels: usize, density: f64) -> String {
    format!("n{n}-l{num_labels}-d{density}")
}

struct ItemResult {
    ub: Option<f64>,
    optimal: bool,
    time_s: f64,
    gap: f64,
    gapr: f64,
    nodes: usize,
    cuts: usize,
    failed: bool,
}

/// Runs the sweep. Instances may run in parallel (`jobs`), each solve stays
/// single-threaded; aggregation order is fixed, so UB/O/gap/gapr columns are
/// reproducible for identical seeds.
pub fn run_bench(spec: &BenchSpec) -> Vec<GroupRow> {
    let mut groups = Vec::new();
    for &n in &spec.ns {
        for &l in &spec.labels {
            for &d in &spec.densities {
                groups.push((n, l, d));
            }
        }
    }

    // Work items in deterministic order
    let mut items: Vec<(usize, Method, InstanceSpec)> = Vec::new();
    for (gi, &(n, l, d)) in groups.iter().enumerate() {
        for &model in &spec.models {
            for &seed in &spec.seeds {
                items.push((
                    gi,
                    model,
                    InstanceSpec {
                        n,
                        num_labels: l,
                        density: d,
                        scenario: spec.scenario,
                        seed,
                    },
                ));
            }
        }
    }

    let results: Vec<Mutex<Option<ItemResult>>> =
        items.iter().map(|_| Mutex::new(None)).collect();
    let next = std::sync::atomic::AtomicUsize::new(0);
    let jobs = spec.jobs.max(1);
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(items.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let (_, model, inst) = &items[i];
                let r = run_item(*model, inst, spec);
                *results[i].lock().unwrap() = Some(r);
            });
        }
    });

    let mut rows = Vec::new();
    for (gi, &(n, l, d)) in groups.iter().enumerate() {
        for &model in &spec.models {
            let slice: Vec<ItemResult> = items
                .iter()
                .zip(&results)
                .filter(|((g, m, _), _)| *g == gi && *m == model)
                .map(|(_, r)| r.lock().unwrap().take().expect("worker finished"))
                .collect();
            let total = slice.len().max(1) as f64;
            let ubs: Vec<f64> = slice.iter().filter_map(|r| r.ub).collect();
            let mean = |f: &dyn Fn(&ItemResult) -> f64| {
                slice.iter().map(|r| f(r)).sum::<f64>() / total
            };
            rows.push(GroupRow {
                group: group_name(n, l, d),
                model,
                mean_ub: if ubs.is_empty() {
                    f64::NAN
                } else {
                    ubs.iter().sum::<f64>() / ubs.len() as f64
                },
                optimal: slice.iter().filter(|r| r.optimal).count(),
                mean_time_s: mean(&|r| r.time_s),
                mean_gap: mean(&|r| r.gap),
                mean_gapr: mean(&|r| r.gapr),
                mean_nodes: mean(&|r| r.nodes as f64),
                mean_cuts: mean(&|r| r.cuts as f64),
                failures: slice.iter().filter(|r| r.failed).count(),
            });
        }
    }
    rows
}

fn run_item(model: Method, inst: &InstanceSpec, spec: &BenchSpec) -> ItemResult {
    let failed = ItemResult {
        ub: None,
        optimal: false,
        time_s: 0.0,
        gap: 0.0,
        gapr: 0.0,
        nodes: 0,
        cuts: 0,
        failed: true,
    };
    let Ok(g) = generate(inst) else {
        return failed;
    };
    let opts = SolveOptions {
        time_limit_s: spec.time_limit_s,
        heuristic_ub: spec.heuristic_ub,
        seed: inst.seed,
    };
    match solve_instance(&g, model, &opts) {
        Ok(r) => ItemResult {
            ub: r.best.as_ref().map(|c| c.cost),
            optimal: r.status == SolveStatus::Optimal,
            time_s: r.wall_time_s,
            gap: r.gap().unwrap_or(0.0),
            gapr: r.gapr().unwrap_or(0.0),
            nodes: r.nodes,
            cuts: r.cuts,
            failed: false,
        },
        Err(_) => failed,
    }
}

pub const CSV_HEADER: &str = "group,model,mean_ub,O,t_s,gap,gapr,nodes,cuts";

pub fn rows_to_csv(rows: &[GroupRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{:.4},{},{:.3},{:.2},{:.2},{:.1},{:.1}",
            r.group,
            r.model,
            r.mean_ub,
            r.optimal,
            r.mean_time_s,
            r.mean_gap,
            r.mean_gapr,
            r.mean_nodes,
            r.mean_cuts
        );
    }
    out
}

pub fn rows_to_table(rows: &[GroupRow]) -> String {
    let mut out = format!(
        "{:<16} {:<6} {:>9} {:>4} {:>9} {:>7} {:>7} {:>8} {:>8} {:>5}\n",
        "group", "model", "UB", "O", "t(s)", "gap", "gapr", "nodes", "cuts", "fail"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<16} {:<6} {:>9.4} {:>4} {:>9.3} {:>7.2} {:>7.2} {:>8.1} {:>8.1} {:>5}",
            r.group,
            r.model,
            r.mean_ub,
            r.optimal,
            r.mean_time_s,
            r.mean_gap,
            r.mean_gapr,
            r.mean_nodes,
            r.mean_cuts,
            r.failures
        );
    }
    out
}
