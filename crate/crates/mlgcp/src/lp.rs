//! Bounded-variable primal simplex for the node relaxations.
//!
//! Two-phase full-tableau method. Structural variables must have finite
//! bounds (all model variables live in [0, 1]); row slacks may be unbounded
//! on one side. Dantzig pricing, switching to Bland's rule after a budget of
//! degenerate pivots.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Ge,
    Le,
    Eq,
}

#[derive(Debug, Clone)]
pub struct LpRow {
    /// Sparse (variable index, coefficient) pairs.
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl LpRow {
    pub fn new(coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> Self {
        LpRow { coeffs, sense, rhs }
    }

    /// Signed violation of the row at a point: positive means the point
    /// breaks the row by that amount, non-positive means satisfied.
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs: f64 = self.coeffs.iter().map(|&(j, c)| c * values[j]).sum();
        match self.sense {
            Sense::Ge => self.rhs - lhs,
            Sense::Le => lhs - self.rhs,
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// Minimization LP with boxed variables.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub rows: Vec<LpRow>,
    pub bounds: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum LpError {
    #[error("malformed problem: {0}")]
    Malformed(String),
    #[error("numerically unstable: {0}")]
    Unstable(String),
}

pub const FEAS_TOL: f64 = 1e-7;
pub const COST_TOL: f64 = 1e-9;
pub const INT_TOL: f64 = 1e-6;

impl LpProblem {
    pub fn new(num_vars: usize, objective: Vec<f64>, bounds: Vec<(f64, f64)>) -> Self {
        LpProblem {
            num_vars,
            objective,
            rows: Vec::new(),
            bounds,
        }
    }

    fn check(&self) -> Result<(), LpError> {
        if self.objective.len() != self.num_vars || self.bounds.len() != self.num_vars {
            return Err(LpError::Malformed(
                "objective/bounds length mismatch".into(),
            ));
        }
        for &(lo, hi) in &self.bounds {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(LpError::Malformed(format!("bad bounds [{lo}, {hi}]")));
            }
        }
        for row in &self.rows {
            for &(j, c) in &row.coeffs {
                if j >= self.num_vars || !c.is_finite() {
                    return Err(LpError::Malformed(format!(
                        "row references variable {j} with coefficient {c}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Text dump in LP-like format, for external cross-checking.
    pub fn dump(&self) -> String {
        let mut out = String::from("Minimize\n obj:");
        for (j, &c) in self.objective.iter().enumerate() {
            if c != 0.0 {
                let _ = write!(out, " {:+} x{}", c, j);
            }
        }
        out.push_str("\nSubject To\n");
        for (i, row) in self.rows.iter().enumerate() {
            let _ = write!(out, " r{}:", i);
            for &(j, c) in &row.coeffs {
                let _ = write!(out, " {:+} x{}", c, j);
            }
            let op = match row.sense {
                Sense::Ge => ">=",
                Sense::Le => "<=",
                Sense::Eq => "=",
            };
            let _ = writeln!(out, " {} {}", op, row.rhs);
        }
        out.push_str("Bounds\n");
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            let _ = writeln!(out, " {} <= x{} <= {}", lo, j, hi);
        }
        out.push_str("End\n");
        out
    }
}

/// Solves the LP from a cold start.
pub fn lp_solve(p: &LpProblem) -> Result<LpSolution, LpError> {
    p.check()?;
    let sol = Simplex::build(p)?.run()?;
    if sol.status == LpStatus::Optimal {
        for (i, row) in p.rows.iter().enumerate() {
            let v = row.violation(&sol.values);
            if v > FEAS_TOL {
                return Err(LpError::Unstable(format!(
                    "row {i} violated by {v} at claimed optimum"
                )));
            }
        }
    }
    Ok(sol)
}

/// Appends rows and re-solves. The result is identical to solving the
/// augmented problem from scratch (and is currently computed that way).
pub fn add_rows_and_resolve(p: &mut LpProblem, new_rows: Vec<LpRow>) -> Result<LpSolution, LpError> {
    p.rows.extend(new_rows);
    lp_solve(p)
}

struct Simplex {
    nrows: usize,
    ncols: usize,        // structural + slack + artificial
    nstruct: usize,
    narts: usize,
    tableau: Vec<Vec<f64>>, // nrows x ncols, starts as B^-1 A with identity basis
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost2: Vec<f64>, // phase-2 objective over all columns
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    x: Vec<f64>,
    dvec: Vec<f64>, // reduced costs, maintained across pivots
    degenerate_pivots: usize,
    bland: bool,
}

impl Simplex {
    fn build(p: &LpProblem) -> Result<Simplex, LpError> {
        let nrows = p.rows.len();
        let nstruct = p.num_vars;
        let nslack = nrows;
        let mut lower = Vec::with_capacity(nstruct + nslack);
        let mut upper = Vec::with_capacity(nstruct + nslack);
        for &(lo, hi) in &p.bounds {
            lower.push(lo);
            upper.push(hi);
        }
        for row in &p.rows {
            let (lo, hi) = match row.sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            lower.push(lo);
            upper.push(hi);
        }

        // structural nonbasics start at their lower bound
        let mut x = vec![0.0; nstruct + nslack];
        for j in 0..nstruct {
            x[j] = lower[j];
        }

        // dense rows: A x + s = b
        let mut tableau: Vec<Vec<f64>> = Vec::with_capacity(nrows);
        let mut resid = Vec::with_capacity(nrows);
        for (i, row) in p.rows.iter().enumerate() {
            let mut dense = vec![0.0; nstruct + nslack];
            for &(j, c) in &row.coeffs {
                dense[j] += c;
            }
            dense[nstruct + i] = 1.0;
            let ax: f64 = (0..nstruct).map(|j| dense[j] * x[j]).sum();
            resid.push(row.rhs - ax); // required slack value
            tableau.push(dense);
        }

        // rows whose slack cannot hold the residual get an artificial
        let mut basis = Vec::with_capacity(nrows);
        let mut art_cols: Vec<usize> = Vec::new();
        let mut art_vals: Vec<f64> = Vec::new();
        let mut flip: Vec<bool> = vec![false; nrows];
        for i in 0..nrows {
            let s = nstruct + i;
            let r = resid[i];
            if r >= lower[s] - 1e-12 && r <= upper[s] + 1e-12 {
                x[s] = r;
                basis.push(s);
            } else {
                let clamped = r.min(upper[s]).max(lower[s]);
                x[s] = clamped;
                let t = r - clamped;
                flip[i] = t < 0.0;
                art_cols.push(i);
                art_vals.push(t.abs());
                basis.push(usize::MAX); // patched below
            }
        }
        let narts = art_cols.len();
        let ncols = nstruct + nslack + narts;
        for row in tableau.iter_mut() {
            row.resize(ncols, 0.0);
        }
        lower.resize(ncols, 0.0);
        upper.resize(ncols, f64::INFINITY);
        x.resize(ncols, 0.0);
        for (k, (&i, &v)) in art_cols.iter().zip(&art_vals).enumerate() {
            let col = nstruct + nslack + k;
            if flip[i] {
                for c in tableau[i].iter_mut() {
                    *c = -*c;
                }
            }
            tableau[i][col] = 1.0;
            x[col] = v;
            basis[i] = col;
        }

        let mut in_basis = vec![false; ncols];
        for &b in &basis {
            in_basis[b] = true;
        }

        let mut cost2 = vec![0.0; ncols];
        cost2[..nstruct].copy_from_slice(&p.objective);

        Ok(Simplex {
            nrows,
            ncols,
            nstruct,
            narts,
            tableau,
            lower,
            upper,
            cost2,
            basis,
            in_basis,
            x,
            dvec: vec![0.0; ncols],
            degenerate_pivots: 0,
            bland: false,
        })
    }

    fn run(mut self) -> Result<LpSolution, LpError> {
        if self.narts > 0 {
            let mut cost1 = vec![0.0; self.ncols];
            for c in cost1.iter_mut().skip(self.ncols - self.narts) {
                *c = 1.0;
            }
            self.optimize(&cost1)?;
            let infeas: f64 = (self.ncols - self.narts..self.ncols)
                .map(|j| self.x[j])
                .sum();
            if infeas > FEAS_TOL {
                return Ok(LpSolution {
                    status: LpStatus::Infeasible,
                    objective: f64::NAN,
                    values: vec![],
                });
            }
            // pin artificials to zero for phase 2
            for j in self.ncols - self.narts..self.ncols {
                self.lower[j] = 0.0;
                self.upper[j] = 0.0;
                self.x[j] = 0.0;
            }
        }
        let cost2 = self.cost2.clone();
        self.optimize(&cost2)?;
        self.extract()
    }

    fn recompute_reduced_costs(&mut self, cost: &[f64]) {
        self.dvec.copy_from_slice(cost);
        for i in 0..self.nrows {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.tableau[i];
                for (d, &a) in self.dvec.iter_mut().zip(row) {
                    *d -= cb * a;
                }
            }
        }
    }

    fn optimize(&mut self, cost: &[f64]) -> Result<(), LpError> {
        self.recompute_reduced_costs(cost);
        let max_iters = 20_000 + 200 * (self.nrows + self.ncols);
        let bland_after = 5 * (self.nrows + self.ncols);
        for _iter in 0..max_iters {
            let Some((j, dir)) = self.choose_entering() else {
                return Ok(());
            };
            self.step(j, dir, bland_after)?;
        }
        Err(LpError::Unstable("iteration limit exceeded".into()))
    }

    /// Entering column and its movement direction (+1 from lower, -1 from
    /// upper). None means the current point is optimal.
    fn choose_entering(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None; // (col, dir, score)
        for j in 0..self.ncols {
            if self.in_basis[j] || self.upper[j] - self.lower[j] < 1e-15 {
                continue;
            }
            let d = self.dvec[j];
            let at_lower = (self.x[j] - self.lower[j]).abs() <= (self.x[j] - self.upper[j]).abs();
            let (dir, score) = if at_lower { (1.0, -d) } else { (-1.0, d) };
            if score > COST_TOL {
                if self.bland {
                    return Some((j, dir));
                }
                if best.map_or(true, |(_, _, s)| score > s) {
                    best = Some((j, dir, score));
                }
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    fn step(&mut self, j: usize, dir: f64, bland_after: usize) -> Result<(), LpError> {
        // ratio test: entering moves by t >= 0 in direction dir
        let mut t_max = self.upper[j] - self.lower[j]; // bound flip distance
        let mut leave: Option<usize> = None; // pivot row
        for i in 0..self.nrows {
            let a = self.tableau[i][j];
            if a.abs() < 1e-10 {
                continue;
            }
            let b = self.basis[i];
            let rate = -dir * a; // d x_b / d t
            let limit = if rate > 0.0 {
                if self.upper[b].is_finite() {
                    (self.upper[b] - self.x[b]) / rate
                } else {
                    continue;
                }
            } else if self.lower[b].is_finite() {
                (self.lower[b] - self.x[b]) / rate
            } else {
                continue;
            };
            let limit = limit.max(0.0);
            let replace = match leave {
                None => limit < t_max - 1e-12,
                Some(r) => {
                    limit < t_max - 1e-12
                        || (limit <= t_max + 1e-12
                            && self.bland
                            && self.basis[i] < self.basis[r])
                }
            };
            if replace {
                t_max = limit.min(t_max);
                leave = Some(i);
            }
        }

        if !t_max.is_finite() {
            return Err(LpError::Unstable(
                "unbounded direction in boxed LP".into(),
            ));
        }
        if t_max <= 1e-12 {
            self.degenerate_pivots += 1;
            if self.degenerate_pivots > bland_after {
                self.bland = true;
            }
        }

        // apply the move
        self.x[j] += dir * t_max;
        for i in 0..self.nrows {
            let a = self.tableau[i][j];
            if a != 0.0 {
                let b = self.basis[i];
                self.x[b] -= dir * a * t_max;
            }
        }

        if let Some(r) = leave {
            let b = self.basis[r];
            // snap the leaving variable onto the bound it reached
            let rate = -dir * self.tableau[r][j];
            self.x[b] = if rate > 0.0 { self.upper[b] } else { self.lower[b] };
            self.pivot(r, j);
        }
        Ok(())
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let piv = self.tableau[r][j];
        let inv = 1.0 / piv;
        for c in self.tableau[r].iter_mut() {
            *c *= inv;
        }
        let prow = self.tableau[r].clone();
        for (i, row) in self.tableau.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[j];
            if f != 0.0 {
                for (c, &p) in row.iter_mut().zip(&prow) {
                    *c -= f * p;
                }
                row[j] = 0.0;
            }
        }
        let f = self.dvec[j];
        if f != 0.0 {
            for (d, &p) in self.dvec.iter_mut().zip(&prow) {
                *d -= f * p;
            }
            self.dvec[j] = 0.0;
        }
        self.in_basis[self.basis[r]] = false;
        self.in_basis[j] = true;
        self.basis[r] = j;
    }

    fn extract(self) -> Result<LpSolution, LpError> {
        let values: Vec<f64> = self.x[..self.nstruct].to_vec();
        for (j, &v) in values.iter().enumerate() {
            if v < self.lower[j] - 1e-9 || v > self.upper[j] + 1e-9 {
                return Err(LpError::Unstable(format!(
                    "variable {j} = {v} escapes its bounds"
                )));
            }
        }
        let objective = values
            .iter()
            .zip(&self.cost2[..self.nstruct])
            .map(|(v, c)| v * c)
            .sum();
        Ok(LpSolution {
            status: LpStatus::Optimal,
            objective,
            values,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn feasible(p: &LpProblem, sol: &LpSolution) -> bool {
        p.rows.iter().all(|r| r.violation(&sol.values) <= FEAS_TOL)
            && sol
                .values
                .iter()
                .zip(&p.bounds)
                .all(|(&v, &(lo, hi))| v >= lo - 1e-9 && v <= hi + 1e-9)
    }

    #[test]
    fn single_variable_bound() {
        let mut p = LpProblem::new(1, vec![1.0], vec![(0.0, 1.0)]);
        p.rows.push(LpRow::new(vec![(0, 1.0)], Sense::Ge, 0.5));
        let s = lp_solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 0.5).abs() < 1e-9);
    }

    #[test]
    fn infeasible_box() {
        let mut p = LpProblem::new(1, vec![1.0], vec![(0.0, 1.0)]);
        p.rows.push(LpRow::new(vec![(0, 1.0)], Sense::Ge, 2.0));
        let s = lp_solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
    }

    #[test]
    fn covering_row_over_four_of_six_labels() {
        // min sum of six z, one row z0+z2+z3+z4 >= 1: optimum 1.0
        // (any point on the row sums to at least 1, and (1,0,0,0,0,0) attains it)
        let mut p = LpProblem::new(6, vec![1.0; 6], vec![(0.0, 1.0); 6]);
        let s = lp_solve(&p).unwrap();
        assert_eq!(s.objective, 0.0);
        let s = add_rows_and_resolve(
            &mut p,
            vec![LpRow::new(
                vec![(0, 1.0), (2, 1.0), (3, 1.0), (4, 1.0)],
                Sense::Ge,
                1.0,
            )],
        )
        .unwrap();
        assert!((s.objective - 1.0).abs() < 1e-9, "got {}", s.objective);
    }

    #[test]
    fn non_binding_row_keeps_objective() {
        let mut p = LpProblem::new(2, vec![1.0, 2.0], vec![(0.0, 1.0); 2]);
        p.rows.push(LpRow::new(vec![(0, 1.0), (1, 1.0)], Sense::Ge, 0.5));
        let a = lp_solve(&p).unwrap();
        let b = add_rows_and_resolve(
            &mut p,
            vec![LpRow::new(vec![(0, 1.0), (1, 1.0)], Sense::Le, 5.0)],
        )
        .unwrap();
        assert!((a.objective - b.objective).abs() < 1e-9);
        let c = add_rows_and_resolve(&mut p, vec![]).unwrap();
        assert_eq!(b.values, c.values);
    }

    #[test]
    fn equality_rows() {
        let mut p = LpProblem::new(2, vec![-1.0, -1.0], vec![(0.0, 1.0); 2]);
        p.rows.push(LpRow::new(vec![(0, 1.0), (1, 1.0)], Sense::Eq, 0.75));
        let s = lp_solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 0.75).abs() < 1e-9);
        assert!(feasible(&p, &s));
    }

    // Independent oracle: enumerate candidate vertices by solving every
    // square system drawn from active rows and active bounds.
    fn vertex_oracle(p: &LpProblem) -> Option<f64> {
        let n = p.num_vars;
        // constraints: each row as equality, each bound as equality
        let mut cons: Vec<(Vec<f64>, f64)> = Vec::new();
        for row in &p.rows {
            let mut a = vec![0.0; n];
            for &(j, c) in &row.coeffs {
                a[j] += c;
            }
            cons.push((a, row.rhs));
        }
        for j in 0..n {
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            cons.push((a.clone(), p.bounds[j].0));
            cons.push((a, p.bounds[j].1));
        }
        let m = cons.len();
        let mut best: Option<f64> = None;
        let mut idx = vec![0usize; n];
        fn rec(
            k: usize,
            start: usize,
            n: usize,
            m: usize,
            idx: &mut Vec<usize>,
            cons: &[(Vec<f64>, f64)],
            p: &LpProblem,
            best: &mut Option<f64>,
        ) {
            if k == n {
                if let Some(x) = solve_square(idx, cons, n) {
                    let ok = p.rows.iter().all(|r| match r.sense {
                        Sense::Ge => {
                            r.coeffs.iter().map(|&(j, c)| c * x[j]).sum::<f64>()
                                >= r.rhs - 1e-7
                        }
                        Sense::Le => {
                            r.coeffs.iter().map(|&(j, c)| c * x[j]).sum::<f64>()
                                <= r.rhs + 1e-7
                        }
                        Sense::Eq => {
                            (r.coeffs.iter().map(|&(j, c)| c * x[j]).sum::<f64>() - r.rhs)
                                .abs()
                                <= 1e-7
                        }
                    }) && x
                        .iter()
                        .zip(&p.bounds)
                        .all(|(&v, &(lo, hi))| v >= lo - 1e-7 && v <= hi + 1e-7);
                    if ok {
                        let obj: f64 =
                            x.iter().zip(&p.objective).map(|(v, c)| v * c).sum();
                        if best.map_or(true, |b| obj < b) {
                            *best = Some(obj);
                        }
                    }
                }
                return;
            }
            for i in start..m {
                idx[k] = i;
                rec(k + 1, i + 1, n, m, idx, cons, p, best);
            }
        }
        fn solve_square(idx: &[usize], cons: &[(Vec<f64>, f64)], n: usize) -> Option<Vec<f64>> {
            let mut a: Vec<Vec<f64>> = idx.iter().map(|&i| cons[i].0.clone()).collect();
            let mut b: Vec<f64> = idx.iter().map(|&i| cons[i].1).collect();
            for col in 0..n {
                let piv = (col..n).max_by(|&x, &y| {
                    a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap()
                })?;
                if a[piv][col].abs() < 1e-9 {
                    return None;
                }
                a.swap(col, piv);
                b.swap(col, piv);
                for r in 0..n {
                    if r != col {
                        let f = a[r][col] / a[col][col];
                        for c in col..n {
                            a[r][c] -= f * a[col][c];
                        }
                        b[r] -= f * b[col];
                    }
                }
            }
            Some((0..n).map(|i| b[i] / a[i][i]).collect())
        }
        rec(0, 0, n, m, &mut idx, &cons, p, &mut best);
        best
    }

    #[test]
    fn random_lps_match_vertex_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20240601);
        for case in 0..200 {
            let n = 5;
            let nrows = 8;
            let mut p = LpProblem::new(
                n,
                (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                vec![(0.0, 1.0); n],
            );
            for _ in 0..nrows {
                let mut coeffs: Vec<(usize, f64)> = Vec::new();
                for j in 0..n {
                    if rng.gen_bool(0.7) {
                        coeffs.push((j, rng.gen_range(-1.0..1.0)));
                    }
                }
                if coeffs.is_empty() {
                    continue;
                }
                let sense = match rng.gen_range(0..3) {
                    0 => Sense::Ge,
                    1 => Sense::Le,
                    _ => Sense::Eq,
                };
                let rhs = rng.gen_range(-0.5..1.5);
                p.rows.push(LpRow::new(coeffs, sense, rhs));
            }
            let got = lp_solve(&p).unwrap();
            let want = vertex_oracle(&p);
            match (got.status, want) {
                (LpStatus::Optimal, Some(w)) => {
                    assert!(
                        (got.objective - w).abs() < 1e-6,
                        "case {case}: simplex {} vs oracle {w}",
                        got.objective
                    );
                    assert!(feasible(&p, &got), "case {case}: infeasible answer");
                }
                (LpStatus::Infeasible, None) => {}
                (s, w) => panic!("case {case}: simplex {s:?} vs oracle {w:?}"),
            }
        }
    }

    #[test]
    fn objective_invariant_under_row_permutation() {
        use rand::{seq::SliceRandom, SeedableRng};
        let mut p = LpProblem::new(3, vec![1.0, 0.5, 2.0], vec![(0.0, 1.0); 3]);
        p.rows.push(LpRow::new(vec![(0, 1.0), (1, 1.0)], Sense::Ge, 1.0));
        p.rows.push(LpRow::new(vec![(1, 1.0), (2, 1.0)], Sense::Ge, 0.5));
        p.rows.push(LpRow::new(vec![(0, 1.0), (2, -1.0)], Sense::Le, 0.8));
        let base = lp_solve(&p).unwrap().objective;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            p.rows.shuffle(&mut rng);
            let s = lp_solve(&p).unwrap();
            assert!((s.objective - base).abs() < 1e-7);
        }
    }
}
