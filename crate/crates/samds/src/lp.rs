//! Dense standard-form linear programs (`min c.x`, `A x = b`, `x >= 0`) and a
//! self-contained two-phase simplex solver.
//!
//! The relaxation LPs built in this crate are small and dense, and they carry
//! many redundant equality rows, so the solver keeps a full tableau with
//! explicit artificial columns, drives artificials out of the basis after
//! phase 1 (deleting rows that turn out redundant), and recomputes reduced
//! costs from scratch for phase 2. Pivoting uses the most-negative-cost rule
//! and falls back to Bland's rule while the objective is stalled, so runs are
//! deterministic and cycling terminates.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PIVOT_TOL: f64 = 1e-10;
pub const FEAS_TOL: f64 = 1e-7;
pub const DEFAULT_PIVOT_CAP: usize = 1_000_000;

/// Entering threshold on reduced costs; looser than the pivot-element
/// threshold so round-off in the cost row cannot drive useless pivots.
const ENTER_TOL: f64 = 1e-9;

/// Consecutive non-improving pivots tolerated before switching to Bland's rule.
const STALL_LIMIT: usize = 256;

/// Recompute reduced costs from the basis this often; long degenerate runs
/// otherwise accumulate drift in the incrementally updated cost row.
const REFRESH_EVERY: usize = 512;

/// `min c.x` subject to `A x = b`, `x >= 0`, rows stored dense.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    rows: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.num_vars..(i + 1) * self.num_vars]
    }

    pub fn push_row(&mut self, coeffs: Vec<f64>, rhs: f64) {
        assert_eq!(coeffs.len(), self.num_vars);
        self.rows.extend_from_slice(&coeffs);
        self.rhs.push(rhs);
    }

    /// Append an all-zero row and return a mutable view of it for filling.
    pub fn push_empty_row(&mut self, rhs: f64) -> &mut [f64] {
        self.rows.resize(self.rows.len() + self.num_vars, 0.0);
        self.rhs.push(rhs);
        let start = self.rows.len() - self.num_vars;
        &mut self.rows[start..]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.rows[i * self.num_vars..(i + 1) * self.num_vars]
    }

    pub fn validate(&self) -> Result<()> {
        if self.objective.len() != self.num_vars {
            return Err(Error::InvalidParameter("objective length mismatch".into()));
        }
        if self.rows.len() != self.num_vars * self.rhs.len() {
            return Err(Error::InvalidParameter("row storage mismatch".into()));
        }
        let finite = self.objective.iter().all(|v| v.is_finite())
            && self.rows.iter().all(|v| v.is_finite())
            && self.rhs.iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("LP entries must be finite".into()));
        }
        Ok(())
    }

    /// Plain-text dump (objective, rows, rhs) for external cross-checking.
    pub fn write_text<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "MINIMIZE {} VARS {} ROWS", self.num_vars, self.num_rows())?;
        write!(w, "OBJ")?;
        for c in &self.objective {
            write!(w, " {c:.17e}")?;
        }
        writeln!(w)?;
        for i in 0..self.num_rows() {
            write!(w, "EQ")?;
            for v in self.row(i) {
                write!(w, " {v:.17e}")?;
            }
            writeln!(w, " = {:.17e}", self.rhs[i])?;
        }
        writeln!(w, "BOUNDS X >= 0")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl LpStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective_value: f64,
    pub iterations: usize,
}

/// True iff `|A x - b|_inf <= tol` and every coordinate is `>= -tol`.
pub fn check_feasible(lp: &LinearProgram, x: &[f64], tol: f64) -> bool {
    if x.len() != lp.num_vars {
        return false;
    }
    if x.iter().any(|&v| v < -tol) {
        return false;
    }
    for i in 0..lp.num_rows() {
        let dot: f64 = lp.row(i).iter().zip(x).map(|(a, v)| a * v).sum();
        if (dot - lp.rhs[i]).abs() > tol {
            return false;
        }
    }
    true
}

struct Tableau {
    width: usize,
    rows: Vec<f64>,
    cost: Vec<f64>, // reduced costs; last entry = -objective
    basis: Vec<usize>,
    pivot_row: Vec<f64>, // scratch
    pivots: usize,
    cap: usize,
    trace: bool,
}

enum Step {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn m(&self) -> usize {
        self.basis.len()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let piv = self.rows[r * w + c];
        self.pivot_row.clear();
        self.pivot_row.extend_from_slice(&self.rows[r * w..(r + 1) * w]);
        for v in &mut self.pivot_row {
            *v /= piv;
        }
        self.pivot_row[c] = 1.0;
        self.rows[r * w..(r + 1) * w].copy_from_slice(&self.pivot_row);
        for i in 0..self.m() {
            if i == r {
                continue;
            }
            let f = self.rows[i * w + c];
            if f != 0.0 {
                let row = &mut self.rows[i * w..(i + 1) * w];
                for (rv, pv) in row.iter_mut().zip(&self.pivot_row) {
                    *rv -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        let f = self.cost[c];
        if f != 0.0 {
            for (cv, pv) in self.cost.iter_mut().zip(&self.pivot_row) {
                *cv -= f * pv;
            }
            self.cost[c] = 0.0;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Recompute the cost row from the basis: `r_j = c_j - sum_i c_B(i) T_ij`
    /// and `-objective` in the rhs slot.
    fn refresh_cost<F: Fn(usize) -> f64>(&mut self, col_cost: &F) {
        let w = self.width;
        for j in 0..w - 1 {
            self.cost[j] = col_cost(j);
        }
        self.cost[w - 1] = 0.0;
        for i in 0..self.m() {
            let cb = col_cost(self.basis[i]);
            if cb != 0.0 {
                let row = &self.rows[i * w..(i + 1) * w];
                for (cv, rv) in self.cost.iter_mut().zip(row) {
                    *cv -= cb * rv;
                }
            }
        }
        for i in 0..self.m() {
            self.cost[self.basis[i]] = 0.0;
        }
    }

    /// Run simplex until optimal/unbounded, considering entering columns in
    /// `0..num_cols`. `col_cost` gives the original cost of any column, so
    /// reduced costs can be rebuilt from scratch after degenerate stretches
    /// and before optimality is declared. `stop_below` ends the run early
    /// once the objective is at or under the given value; phase 1 uses it to
    /// stop at feasibility instead of wandering the degenerate zero face.
    fn run<F: Fn(usize) -> f64>(
        &mut self,
        num_cols: usize,
        col_cost: &F,
        stop_below: Option<f64>,
    ) -> Result<Step> {
        let w = self.width;
        let mut stall = 0usize;
        let mut bland = false;
        let mut since_refresh = 0usize;
        loop {
            if let Some(thresh) = stop_below {
                if -self.cost[w - 1] <= thresh {
                    self.refresh_cost(col_cost);
                    since_refresh = 0;
                    if -self.cost[w - 1] <= thresh {
                        return Ok(Step::Optimal);
                    }
                }
            }
            let mut refreshed = false;
            let c = loop {
                // entering column
                let mut enter: Option<usize> = None;
                if bland {
                    for j in 0..num_cols {
                        if self.cost[j] < -ENTER_TOL {
                            enter = Some(j);
                            break;
                        }
                    }
                } else {
                    let mut best = -ENTER_TOL;
                    for j in 0..num_cols {
                        if self.cost[j] < best {
                            best = self.cost[j];
                            enter = Some(j);
                        }
                    }
                }
                match enter {
                    Some(c) => break c,
                    None if !refreshed && since_refresh > 0 => {
                        // rule out drift before declaring optimality
                        self.refresh_cost(col_cost);
                        since_refresh = 0;
                        refreshed = true;
                    }
                    None => return Ok(Step::Optimal),
                }
            };

            // two-pass ratio test: find the tightest ratio with a small
            // feasibility slack, then among rows inside the slack take the
            // largest pivot element. dividing a row by a near-tolerance pivot
            // smears noise through the whole tableau, and a long solve does
            // thousands of such divisions, so stability beats strictness
            // here; bland mode keeps the classic smallest-index rule instead.
            let mut limit = f64::INFINITY;
            for i in 0..self.m() {
                let a = self.rows[i * w + c];
                if a > PIVOT_TOL {
                    limit = limit.min((self.rows[i * w + w - 1] + 1e-9) / a);
                }
            }
            if limit == f64::INFINITY {
                return Ok(Step::Unbounded);
            }
            let mut leave: Option<usize> = None;
            let mut best_piv = 0.0f64;
            for i in 0..self.m() {
                let a = self.rows[i * w + c];
                if a > PIVOT_TOL && self.rows[i * w + w - 1] / a <= limit {
                    let better = if bland {
                        leave.is_none_or(|l| self.basis[i] < self.basis[l])
                    } else {
                        a > best_piv
                            || (a == best_piv
                                && leave.is_some_and(|l| self.basis[i] < self.basis[l]))
                    };
                    if better {
                        best_piv = a;
                        leave = Some(i);
                    }
                }
            }
            let r = leave.expect("a row attains the ratio limit");

            let before = self.cost[w - 1];
            self.pivot(r, c);
            if self.pivots > self.cap {
                return Err(Error::PivotCapExceeded { cap: self.cap });
            }
            if self.trace && self.pivots % 500 == 0 {
                eprintln!(
                    "pivot {}: obj {:.9} enter {c} leave row {r} bland {bland} stall {stall}",
                    self.pivots,
                    -self.cost[w - 1]
                );
            }
            since_refresh += 1;
            if since_refresh >= REFRESH_EVERY {
                self.refresh_cost(col_cost);
                since_refresh = 0;
            }
            if (self.cost[w - 1] - before).abs() <= 1e-12 {
                stall += 1;
                if stall > STALL_LIMIT {
                    bland = true;
                }
            } else {
                stall = 0;
                bland = false;
            }
        }
    }
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    solve_lp_capped(lp, DEFAULT_PIVOT_CAP)
}

pub fn solve_lp_capped(lp: &LinearProgram, pivot_cap: usize) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.num_vars;
    let m = lp.num_rows();

    // tableau layout: structural | artificial | rhs
    let width = n + m + 1;
    let mut t = Tableau {
        width,
        rows: vec![0.0; m * width],
        cost: vec![0.0; width],
        basis: (n..n + m).collect(),
        pivot_row: Vec::with_capacity(width),
        pivots: 0,
        cap: pivot_cap,
        trace: std::env::var_os("SAMDS_LP_TRACE").is_some(),
    };
    for i in 0..m {
        let sign = if lp.rhs[i] < 0.0 { -1.0 } else { 1.0 };
        let dst = &mut t.rows[i * width..i * width + n];
        for (d, s) in dst.iter_mut().zip(lp.row(i)) {
            *d = sign * s;
        }
        t.rows[i * width + n + i] = 1.0;
        t.rows[i * width + width - 1] = sign * lp.rhs[i];
    }
    // phase 1: minimize the sum of artificials; price out the initial basis
    for j in 0..n {
        let mut s = 0.0;
        for i in 0..m {
            s += t.rows[i * width + j];
        }
        t.cost[j] = -s;
    }
    // the cost row carries -objective in its rhs slot; phase 1 starts at sum(b)
    let rhs_sum: f64 = (0..m).map(|i| t.rows[i * width + width - 1]).sum();
    t.cost[width - 1] = -rhs_sum;

    let phase1_cost = move |j: usize| if j >= n { 1.0 } else { 0.0 };
    match t.run(n + m, &phase1_cost, Some(1e-10))? {
        Step::Optimal => {}
        Step::Unbounded => unreachable!("phase-1 objective is bounded below by 0"),
    }
    let phase1_obj = -t.cost[width - 1];
    if phase1_obj > FEAS_TOL {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            x: vec![0.0; n],
            objective_value: f64::INFINITY,
            iterations: t.pivots,
        });
    }

    // drive artificials out of the basis; rows that cannot pivot are redundant.
    // a basic artificial sits at <= the phase-1 stop threshold, far inside the
    // feasibility tolerance, so its rhs is zeroed first: the replacement pivot
    // is then exactly degenerate and cannot smear `rhs / pivot` noise into the
    // solution. the largest structural element is taken for conditioning.
    let mut keep: Vec<bool> = vec![true; m];
    for i in 0..m {
        if t.basis[i] < n {
            continue;
        }
        t.rows[i * width + width - 1] = 0.0;
        let mut best = PIVOT_TOL;
        let mut pivot_col = None;
        for j in 0..n {
            let a = t.rows[i * width + j].abs();
            if a > best {
                best = a;
                pivot_col = Some(j);
            }
        }
        match pivot_col {
            Some(j) => t.pivot(i, j),
            None => keep[i] = false,
        }
    }

    // compact: drop redundant rows and artificial columns
    let kept: Vec<usize> = (0..m).filter(|&i| keep[i]).collect();
    let m2 = kept.len();
    let width2 = n + 1;
    let mut rows2 = vec![0.0; m2 * width2];
    let mut basis2 = Vec::with_capacity(m2);
    for (new_i, &old_i) in kept.iter().enumerate() {
        rows2[new_i * width2..new_i * width2 + n]
            .copy_from_slice(&t.rows[old_i * width..old_i * width + n]);
        rows2[new_i * width2 + n] = t.rows[old_i * width + width - 1];
        basis2.push(t.basis[old_i]);
    }
    let mut t2 = Tableau {
        width: width2,
        rows: rows2,
        cost: vec![0.0; width2],
        basis: basis2,
        pivot_row: Vec::with_capacity(width2),
        pivots: t.pivots,
        cap: pivot_cap,
        trace: std::env::var_os("SAMDS_LP_TRACE").is_some(),
    };
    drop(t);

    // phase 2 reduced costs under the current basis; the rhs slot ends up
    // holding -objective as required by the pivot updates
    for j in 0..n {
        t2.cost[j] = lp.objective[j];
    }
    for i in 0..m2 {
        let cb = lp.objective[t2.basis[i]];
        if cb != 0.0 {
            for j in 0..=n {
                t2.cost[j] -= cb * t2.rows[i * width2 + j];
            }
        }
    }

    // a nonnegative objective over x >= 0 cannot go below zero, so reaching
    // ~0 proves optimality without walking the degenerate optimal face
    let phase2_stop = if lp.objective.iter().all(|&c| c >= 0.0) {
        Some(1e-12)
    } else {
        None
    };
    let phase2_cost = |j: usize| lp.objective[j];
    let status = match t2.run(n, &phase2_cost, phase2_stop)? {
        Step::Optimal => LpStatus::Optimal,
        Step::Unbounded => LpStatus::Unbounded,
    };

    if status == LpStatus::Unbounded {
        return Ok(LpSolution {
            status,
            x: vec![0.0; n],
            objective_value: f64::NEG_INFINITY,
            iterations: t2.pivots,
        });
    }

    let mut x = vec![0.0; n];
    for i in 0..m2 {
        let v = t2.rows[i * width2 + n];
        x[t2.basis[i]] = if v.abs() < 1e-15 { 0.0 } else { v };
    }
    if !check_feasible(lp, &x, FEAS_TOL) {
        return Err(Error::InvariantViolation(
            "simplex lost feasibility beyond tolerance".into(),
        ));
    }
    let objective_value: f64 = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        objective_value,
        iterations: t2.pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    #[test]
    fn pinned_single_variable() {
        let mut lp = LinearProgram::new(1);
        lp.objective = vec![1.0];
        lp.push_row(vec![1.0], 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.x[0] - 1.0).abs() < 1e-9);
        assert!((sol.objective_value - 1.0).abs() < 1e-9);
        assert!(check_feasible(&lp, &sol.x, FEAS_TOL));
    }

    #[test]
    fn unbounded_direction() {
        let mut lp = LinearProgram::new(1);
        lp.objective = vec![-1.0];
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
    }

    #[test]
    fn infeasible_by_algebra() {
        // x + y = 1 and x - y = 3 force y = -1 < 0
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![1.0, 1.0];
        lp.push_row(vec![1.0, 1.0], 1.0);
        lp.push_row(vec![1.0, -1.0], 3.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    #[test]
    fn redundant_rows_are_harmless() {
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![2.0, 1.0];
        lp.push_row(vec![1.0, 1.0], 1.0);
        lp.push_row(vec![2.0, 2.0], 2.0);
        lp.push_row(vec![1.0, 1.0], 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value - 1.0).abs() < 1e-9);
        assert!((sol.x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn solution_invariants_hold() {
        let mut lp = LinearProgram::new(4);
        lp.objective = vec![1.0, 2.0, -1.0, 0.5];
        lp.push_row(vec![1.0, 1.0, 1.0, 1.0], 2.0);
        lp.push_row(vec![1.0, -1.0, 0.0, 2.0], 0.5);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(check_feasible(&lp, &sol.x, FEAS_TOL));
        assert!(sol.x.iter().all(|&v| v >= -1e-9));
        let dot: f64 = lp.objective.iter().zip(&sol.x).map(|(c, v)| c * v).sum();
        assert!((dot - sol.objective_value).abs() <= 1e-9);
    }

    #[test]
    fn check_feasible_rejects_violations() {
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![1.0, 0.0];
        lp.push_row(vec![1.0, 1.0], 1.0);
        let tol = 1e-6;
        assert!(check_feasible(&lp, &[0.5, 0.5], tol));
        // one row off by 2 * tol
        assert!(!check_feasible(&lp, &[0.5, 0.5 + 2.0 * tol], tol));
        // a -2 * tol entry
        assert!(!check_feasible(&lp, &[1.0 + 2.0 * tol, -2.0 * tol], tol));
    }

    #[test]
    fn pivot_cap_is_a_distinct_error() {
        // three pinned variables need three phase-1 pivots
        let mut lp = LinearProgram::new(3);
        lp.objective = vec![1.0, 1.0, 1.0];
        lp.push_row(vec![1.0, 0.0, 0.0], 1.0);
        lp.push_row(vec![0.0, 1.0, 0.0], 1.0);
        lp.push_row(vec![0.0, 0.0, 1.0], 1.0);
        match solve_lp_capped(&lp, 1) {
            Err(Error::PivotCapExceeded { cap: 1 }) => {}
            other => panic!("expected pivot cap error, got {other:?}"),
        }
    }

    #[test]
    fn deterministic_resolve() {
        let mut rng = rng_from_seed(3);
        let mut lp = LinearProgram::new(8);
        lp.objective = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x0: Vec<f64> = (0..8).map(|_| rng.random_range(0.0..2.0)).collect();
        for _ in 0..4 {
            let row: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
            let rhs: f64 = row.iter().zip(&x0).map(|(a, v)| a * v).sum();
            lp.push_row(row, rhs);
        }
        let a = solve_lp(&lp).unwrap();
        let b = solve_lp(&lp).unwrap();
        assert_eq!(a.status, b.status);
        assert_eq!(a.x, b.x);
        assert_eq!(a.objective_value.to_bits(), b.objective_value.to_bits());
        assert_eq!(a.iterations, b.iterations);
    }

    /// Weak-duality spot check: on LPs whose feasible set contains a known
    /// segment, the optimum is <= the value of every sampled feasible point.
    #[test]
    fn optimum_below_sampled_feasible_values() {
        let mut rng = rng_from_seed(17);
        for _ in 0..20 {
            let nv = 6;
            // two interior points; constraint rows are built orthogonal to
            // their difference so the whole segment stays feasible
            let p: Vec<f64> = (0..nv).map(|_| rng.random_range(0.5..2.0)).collect();
            let q: Vec<f64> = (0..nv).map(|_| rng.random_range(0.5..2.0)).collect();
            let diff: Vec<f64> = p.iter().zip(&q).map(|(a, b)| a - b).collect();
            let d2: f64 = diff.iter().map(|v| v * v).sum();

            let mut lp = LinearProgram::new(nv);
            lp.objective = (0..nv).map(|_| rng.random_range(-1.0..1.0)).collect();
            for _ in 0..3 {
                let raw: Vec<f64> = (0..nv).map(|_| rng.random_range(-1.0..1.0)).collect();
                let proj: f64 = raw.iter().zip(&diff).map(|(a, b)| a * b).sum::<f64>() / d2;
                let row: Vec<f64> = raw.iter().zip(&diff).map(|(a, b)| a - proj * b).collect();
                let rhs: f64 = row.iter().zip(&p).map(|(a, v)| a * v).sum();
                lp.push_row(row, rhs);
            }
            let sol = solve_lp(&lp).unwrap();
            if sol.status != LpStatus::Optimal {
                continue; // unbounded draws are legitimate here
            }
            for _ in 0..50 {
                let t: f64 = rng.random_range(0.0..1.0);
                let point: Vec<f64> = p
                    .iter()
                    .zip(&q)
                    .map(|(a, b)| a * (1.0 - t) + b * t)
                    .collect();
                assert!(check_feasible(&lp, &point, 1e-6));
                let val: f64 = lp.objective.iter().zip(&point).map(|(c, v)| c * v).sum();
                assert!(sol.objective_value <= val + 1e-7);
            }
        }
    }
}
