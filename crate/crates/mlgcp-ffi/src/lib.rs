//! C ABI for the mlgcp solver: opaque handles, integer error codes, and a
//! flat report struct. The header is generated into `include/mlgcp.h` at
//! build time.

use std::ffi::CStr;
use std::os::raw::{c_char, c_double, c_int};

use mlgcp::bnc::SolveStatus;
use mlgcp::gen::{generate, InstanceSpec, Scenario};
use mlgcp::graph::{parse_instance, LabeledGraph};
use mlgcp::solve::{solve_instance, Method, SolveOptions};

/// Error codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MlgcpStatus {
    MlgcpOk = 0,
    MlgcpNullPointer = 1,
    MlgcpInvalidInput = 2,
    MlgcpSolveFailed = 3,
}

/// Solve outcome codes mirrored into `MlgcpReport.status`.
pub const MLGCP_SOLVE_OPTIMAL: c_int = 0;
pub const MLGCP_SOLVE_TIME_LIMIT: c_int = 1;
pub const MLGCP_SOLVE_INFEASIBLE: c_int = 2;

/// Opaque instance handle.
pub struct MlgcpGraph(LabeledGraph);

/// Opaque solution handle; query it with the accessor functions.
pub struct MlgcpSolution {
    labels: Vec<usize>,
    report: MlgcpReport,
}

/// Flat solve summary.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MlgcpReport {
    pub cost: c_double,
    pub lower_bound: c_double,
    pub gap_percent: c_double,
    pub nodes: u64,
    pub cuts: u64,
    pub wall_time_s: c_double,
    pub status: c_int,
    pub num_labels_in_cut: u64,
}

fn method_from_code(model: c_int) -> Option<Method> {
    match model {
        0 => Some(Method::Part),
        1 => Some(Method::Part2),
        2 => Some(Method::P3e),
        3 => Some(Method::Eac),
        4 => Some(Method::BruteForce),
        5 => Some(Method::LocalSearch),
        _ => None,
    }
}

fn scenario_from_code(scenario: c_int) -> Option<Scenario> {
    match scenario {
        0 => Some(Scenario::Unicost),
        1 => Some(Scenario::Random),
        2 => Some(Scenario::Normal),
        _ => None,
    }
}

/// Parses an instance in the mlgcp text format.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mlgcp_graph_parse(
    text: *const c_char,
    out: *mut *mut MlgcpGraph,
) -> MlgcpStatus {
    if text.is_null() || out.is_null() {
        return MlgcpStatus::MlgcpNullPointer;
    }
    let Ok(text) = CStr::from_ptr(text).to_str() else {
        return MlgcpStatus::MlgcpInvalidInput;
    };
    match parse_instance(text) {
        Ok(parsed) => {
            *out = Box::into_raw(Box::new(MlgcpGraph(parsed.graph)));
            MlgcpStatus::MlgcpOk
        }
        Err(_) => MlgcpStatus::MlgcpInvalidInput,
    }
}

/// Generates a seeded random connected instance.
///
/// `scenario`: 0 unicost, 1 random, 2 normal.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mlgcp_graph_generate(
    n: u64,
    num_labels: u64,
    density: c_double,
    scenario: c_int,
    seed: u64,
    out: *mut *mut MlgcpGraph,
) -> MlgcpStatus {
    if out.is_null() {
        return MlgcpStatus::MlgcpNullPointer;
    }
    let Some(scenario) = scenario_from_code(scenario) else {
        return MlgcpStatus::MlgcpInvalidInput;
    };
    let spec = InstanceSpec {
        n: n as usize,
        num_labels: num_labels as usize,
        density,
        scenario,
        seed,
    };
    match generate(&spec) {
        Ok(g) => {
            *out = Box::into_raw(Box::new(MlgcpGraph(g)));
            MlgcpStatus::MlgcpOk
        }
        Err(_) => MlgcpStatus::MlgcpInvalidInput,
    }
}

/// Basic size queries; any output pointer may be NULL to skip it.
///
/// # Safety
/// `g` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn mlgcp_graph_counts(
    g: *const MlgcpGraph,
    num_vertices: *mut u64,
    num_edges: *mut u64,
    num_labels: *mut u64,
) -> MlgcpStatus {
    let Some(g) = g.as_ref() else {
        return MlgcpStatus::MlgcpNullPointer;
    };
    if !num_vertices.is_null() {
        *num_vertices = g.0.num_vertices() as u64;
    }
    if !num_edges.is_null() {
        *num_edges = g.0.num_edges() as u64;
    }
    if !num_labels.is_null() {
        *num_labels = g.0.num_labels() as u64;
    }
    MlgcpStatus::MlgcpOk
}

/// # Safety
/// `g` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mlgcp_graph_free(g: *mut MlgcpGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Solves an instance.
///
/// `model`: 0 part, 1 part2, 2 p3e, 3 eac, 4 brute force, 5 local search.
/// A negative `time_limit_s` means the 3600 s default.
///
/// # Safety
/// `g` and `out` must be valid pointers from this library / the caller.
#[no_mangle]
pub unsafe extern "C" fn mlgcp_solve(
    g: *const MlgcpGraph,
    model: c_int,
    time_limit_s: c_double,
    seed: u64,
    out: *mut *mut MlgcpSolution,
) -> MlgcpStatus {
    let Some(g) = g.as_ref() else {
        return MlgcpStatus::MlgcpNullPointer;
    };
    if out.is_null() {
        return MlgcpStatus::MlgcpNullPointer;
    }
    let Some(method) = method_from_code(model) else {
        return MlgcpStatus::MlgcpInvalidInput;
    };
    let opts = SolveOptions {
        time_limit_s: if time_limit_s < 0.0 { 3600.0 } else { time_limit_s },
        heuristic_ub: true,
        seed,
    };
    match solve_instance(&g.0, method, &opts) {
        Ok(r) => {
            let (cost, labels) = match &r.best {
                Some(cut) => (cut.cost, cut.labels.iter().copied().collect()),
                None => (f64::NAN, Vec::new()),
            };
            let report = MlgcpReport {
                cost,
                lower_bound: r.lower_bound,
                gap_percent: r.gap().unwrap_or(f64::NAN),
                nodes: r.nodes as u64,
                cuts: r.cuts as u64,
                wall_time_s: r.wall_time_s,
                status: match r.status {
                    SolveStatus::Optimal => MLGCP_SOLVE_OPTIMAL,
                    SolveStatus::TimeLimit => MLGCP_SOLVE_TIME_LIMIT,
                    SolveStatus::Infeasible => MLGCP_SOLVE_INFEASIBLE,
                },
                num_labels_in_cut: labels.len() as u64,
            };
            *out = Box::into_raw(Box::new(MlgcpSolution { labels, report }));
            MlgcpStatus::MlgcpOk
        }
        Err(_) => MlgcpStatus::MlgcpSolveFailed,
    }
}

/// # Safety
/// `s` and `report` must be valid.
#[no_mangle]
pub unsafe extern "C" fn mlgcp_solution_report(
    s: *const MlgcpSolution,
    report: *mut MlgcpReport,
) -> MlgcpStatus {
    let Some(s) = s.as_ref() else {
        return MlgcpStatus::MlgcpNullPointer;
    };
    if report.is_null() {
        return MlgcpStatus::MlgcpNullPointer;
    }
    *report = s.report;
    MlgcpStatus::MlgcpOk
}

/// Copies up to `buf_len` cut label ids into `buf`; returns the cut size via
/// `written`.
///
/// # Safety
/// `buf` must point to at least `buf_len` u64 slots.
#[no_mangle]
pub unsafe extern "C" fn mlgcp_solution_labels(
    s: *const MlgcpSolution,
    buf: *mut u64,
    buf_len: u64,
    written: *mut u64,
) -> MlgcpStatus {
    let Some(s) = s.as_ref() else {
        return MlgcpStatus::MlgcpNullPointer;
    };
    let count = s.labels.len().min(buf_len as usize);
    if count > 0 {
        if buf.is_null() {
            return MlgcpStatus::MlgcpNullPointer;
        }
        for (i, &l) in s.labels.iter().take(count).enumerate() {
            *buf.add(i) = l as u64;
        }
    }
    if !written.is_null() {
        *written = s.labels.len() as u64;
    }
    MlgcpStatus::MlgcpOk
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mlgcp_solution_free(s: *mut MlgcpSolution) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;
    use std::ptr;

    #[test]
    fn parse_solve_roundtrip() {
        unsafe {
            let text = CString::new("3 3 3\n0 1 0\n1 2 1\n0 2 2\n").unwrap();
            let mut g: *mut MlgcpGraph = ptr::null_mut();
            assert_eq!(mlgcp_graph_parse(text.as_ptr(), &mut g), MlgcpStatus::MlgcpOk);
            let (mut n, mut m, mut l) = (0u64, 0u64, 0u64);
            mlgcp_graph_counts(g, &mut n, &mut m, &mut l);
            assert_eq!((n, m, l), (3, 3, 3));

            let mut sol: *mut MlgcpSolution = ptr::null_mut();
            assert_eq!(
                mlgcp_solve(g, 3, -1.0, 0, &mut sol),
                MlgcpStatus::MlgcpOk
            );
            let mut report = std::mem::zeroed::<MlgcpReport>();
            mlgcp_solution_report(sol, &mut report);
            assert_eq!(report.status, MLGCP_SOLVE_OPTIMAL);
            assert!((report.cost - 2.0).abs() < 1e-9);
            assert_eq!(report.num_labels_in_cut, 2);

            let mut buf = [0u64; 8];
            let mut written = 0u64;
            mlgcp_solution_labels(sol, buf.as_mut_ptr(), 8, &mut written);
            assert_eq!(written, 2);

            mlgcp_solution_free(sol);
            mlgcp_graph_free(g);
        }
    }

    #[test]
    fn error_codes() {
        unsafe {
            let mut g: *mut MlgcpGraph = ptr::null_mut();
            assert_eq!(
                mlgcp_graph_parse(ptr::null(), &mut g),
                MlgcpStatus::MlgcpNullPointer
            );
            let bad = CString::new("2 1 1\n0 0 0\n").unwrap();
            assert_eq!(
                mlgcp_graph_parse(bad.as_ptr(), &mut g),
                MlgcpStatus::MlgcpInvalidInput
            );
            assert_eq!(
                mlgcp_graph_generate(4, 2, 1.0, 9, 0, &mut g),
                MlgcpStatus::MlgcpInvalidInput
            );
            assert_eq!(
                mlgcp_graph_generate(4, 2, 1.0, 0, 7, &mut g),
                MlgcpStatus::MlgcpOk
            );
            let mut sol: *mut MlgcpSolution = ptr::null_mut();
            assert_eq!(
                mlgcp_solve(g, 42, -1.0, 0, &mut sol),
                MlgcpStatus::MlgcpInvalidInput
            );
            mlgcp_graph_free(g);
        }
    }
}
