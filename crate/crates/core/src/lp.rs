//! Dense two-phase primal simplex.
//!
//! Problems are `maximize c'x` subject to linear rows (`<=`, `>=`, `=`) and
//! `x >= 0`. Pivoting uses Dantzig's rule and falls back to Bland's rule
//! after a run of degenerate pivots, which rules out cycling.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-8;
const DEGENERATE_RUN_BEFORE_BLAND: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    /// Sparse `(variable, coefficient)` pairs.
    pub coeffs: Vec<(usize, f64)>,
    pub kind: ConstraintKind,
    pub rhs: f64,
}

/// `maximize objective'x` over `x >= 0` and `constraints`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            objective: vec![0.0; num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<(usize, f64)>, kind: ConstraintKind, rhs: f64) {
        self.constraints.push(Constraint { coeffs, kind, rhs });
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpSolution {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: usize,
    cols: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    basis: Vec<usize>,
    // Reduced costs and objective value for the current phase.
    d: Vec<f64>,
    z: f64,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * self.cols + c]
    }

    fn set_costs(&mut self, costs: &[f64]) {
        self.d.copy_from_slice(costs);
        self.z = 0.0;
        for r in 0..self.rows {
            let cb = costs[self.basis[r]];
            if cb != 0.0 {
                let row = &self.a[r * self.cols..(r + 1) * self.cols];
                for (dj, &arj) in self.d.iter_mut().zip(row) {
                    *dj -= cb * arj;
                }
                self.z += cb * self.b[r];
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let cols = self.cols;
        let inv = 1.0 / self.a[r * cols + c];
        for x in &mut self.a[r * cols..(r + 1) * cols] {
            *x *= inv;
        }
        self.b[r] *= inv;
        self.a[r * cols + c] = 1.0;
        let (pivot_row, pivot_b) = (r * cols, self.b[r]);
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.a[i * cols + c];
            if f == 0.0 {
                continue;
            }
            for j in 0..cols {
                let pj = self.a[pivot_row + j];
                if pj != 0.0 {
                    self.a[i * cols + j] -= f * pj;
                }
            }
            self.a[i * cols + c] = 0.0;
            self.b[i] -= f * pivot_b;
            if self.b[i] < 0.0 && self.b[i] > -FEAS_TOL {
                self.b[i] = 0.0;
            }
        }
        let f = self.d[c];
        if f != 0.0 {
            for j in 0..cols {
                let pj = self.a[pivot_row + j];
                if pj != 0.0 {
                    self.d[j] -= f * pj;
                }
            }
            self.d[c] = 0.0;
            self.z += f * pivot_b;
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations over columns `allowed[j] == true`.
    /// Returns false if the phase is unbounded.
    fn optimize(&mut self, allowed: &[bool], limit: usize) -> Result<bool> {
        let mut degenerate_run = 0;
        let mut bland = false;
        for _ in 0..limit {
            let entering = if bland {
                (0..self.cols).find(|&j| allowed[j] && self.d[j] > OPT_TOL)
            } else {
                (0..self.cols)
                    .filter(|&j| allowed[j] && self.d[j] > OPT_TOL)
                    .max_by(|&a, &b| self.d[a].total_cmp(&self.d[b]).then(b.cmp(&a)))
            };
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let arc = self.at(r, c);
                if arc > PIVOT_TOL {
                    let ratio = self.b[r] / arc;
                    let better = match leave {
                        None => true,
                        Some((lr, best)) => {
                            ratio < best - 1e-12
                                || (ratio <= best + 1e-12 && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return Ok(false);
            };
            if ratio <= 1e-12 {
                degenerate_run += 1;
                if degenerate_run >= DEGENERATE_RUN_BEFORE_BLAND {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, c);
        }
        Err(Error::Numerical(alloc::format!(
            "simplex iteration limit {limit} reached"
        )))
    }
}

/// Solves `lp`. Infeasibility and unboundedness are outcomes; an iteration
/// limit or a non-finite input is an error.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    let nv = lp.num_vars();
    if lp.objective.iter().any(|c| !c.is_finite()) {
        return Err(Error::Numerical("non-finite objective coefficient".into()));
    }
    // Normalize to nonnegative right-hand sides.
    let mut rows: Vec<(Vec<(usize, f64)>, ConstraintKind, f64)> = Vec::new();
    for con in &lp.constraints {
        if !con.rhs.is_finite() || con.coeffs.iter().any(|&(j, a)| j >= nv || !a.is_finite()) {
            return Err(Error::Numerical("malformed constraint".into()));
        }
        if con.rhs < 0.0 {
            let kind = match con.kind {
                ConstraintKind::Le => ConstraintKind::Ge,
                ConstraintKind::Ge => ConstraintKind::Le,
                ConstraintKind::Eq => ConstraintKind::Eq,
            };
            let coeffs = con.coeffs.iter().map(|&(j, a)| (j, -a)).collect();
            rows.push((coeffs, kind, -con.rhs));
        } else {
            rows.push((con.coeffs.clone(), con.kind, con.rhs));
        }
    }
    let m = rows.len();
    let num_slack = rows.iter().filter(|r| r.1 != ConstraintKind::Eq).count();
    let num_art = rows.iter().filter(|r| r.1 != ConstraintKind::Le).count();
    let cols = nv + num_slack + num_art;
    let mut t = Tableau {
        rows: m,
        cols,
        a: vec![0.0; m * cols],
        b: vec![0.0; m],
        basis: vec![0; m],
        d: vec![0.0; cols],
        z: 0.0,
    };
    let (mut s, mut art) = (nv, nv + num_slack);
    for (i, (coeffs, kind, rhs)) in rows.iter().enumerate() {
        for &(j, a) in coeffs {
            t.a[i * cols + j] += a;
        }
        t.b[i] = *rhs;
        match kind {
            ConstraintKind::Le => {
                t.a[i * cols + s] = 1.0;
                t.basis[i] = s;
                s += 1;
            }
            ConstraintKind::Ge => {
                t.a[i * cols + s] = -1.0;
                s += 1;
                t.a[i * cols + art] = 1.0;
                t.basis[i] = art;
                art += 1;
            }
            ConstraintKind::Eq => {
                t.a[i * cols + art] = 1.0;
                t.basis[i] = art;
                art += 1;
            }
        }
    }
    let limit = 50_000 + 50 * (m + cols);
    let first_art = nv + num_slack;

    if num_art > 0 {
        let mut phase1 = vec![0.0; cols];
        phase1[first_art..].iter_mut().for_each(|c| *c = -1.0);
        t.set_costs(&phase1);
        let allowed = vec![true; cols];
        t.optimize(&allowed, limit)?;
        // Only rows that start with an artificial contribute to the phase-1 sum.
        let scale = 1.0
            + rows
                .iter()
                .filter(|r| r.1 != ConstraintKind::Le)
                .fold(0.0f64, |acc, r| acc.max(r.2));
        if t.z < -FEAS_TOL * scale {
            return Ok(LpSolution::Infeasible);
        }
        // Pivot remaining (zero-valued) artificials out of the basis.
        for r in 0..m {
            if t.basis[r] >= first_art {
                if let Some(c) = (0..first_art)
                    .filter(|&c| t.at(r, c).abs() > PIVOT_TOL)
                    .max_by(|&a, &b| t.at(r, a).abs().total_cmp(&t.at(r, b).abs()))
                {
                    t.pivot(r, c);
                }
            }
        }
    }

    let mut phase2 = vec![0.0; cols];
    phase2[..nv].copy_from_slice(&lp.objective);
    t.set_costs(&phase2);
    let mut allowed = vec![true; cols];
    allowed[first_art..].iter_mut().for_each(|a| *a = false);
    if !t.optimize(&allowed, limit)? {
        return Ok(LpSolution::Unbounded);
    }
    let mut x = vec![0.0; nv];
    for r in 0..m {
        if t.basis[r] < nv {
            x[t.basis[r]] = t.b[r].max(0.0);
        }
    }
    let objective = x.iter().zip(&lp.objective).map(|(a, b)| a * b).sum();
    Ok(LpSolution::Optimal { x, objective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ConstraintKind::*;

    fn optimal(lp: &LinearProgram) -> (Vec<f64>, f64) {
        match solve(lp).unwrap() {
            LpSolution::Optimal { x, objective } => (x, objective),
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn loose_row_does_not_mask_infeasibility() {
        // x + y = 1 with x >= 2 is infeasible whatever the scale of other rows.
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![1.0, 0.0];
        lp.add(vec![(0, 1.0), (1, 1.0)], Eq, 1.0);
        lp.add(vec![(0, 1.0)], Ge, 2.0);
        lp.add(vec![(0, 1.0), (1, 1.0)], Le, 1e12);
        assert_eq!(solve(&lp).unwrap(), LpSolution::Infeasible);
    }

    #[test]
    fn textbook_maximum() {
        // max x + 2y, x + y <= 4, 2x + y >= 2, y <= 3  ->  7 at (1, 3)
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![1.0, 2.0];
        lp.add(vec![(0, 1.0), (1, 1.0)], Le, 4.0);
        lp.add(vec![(0, 2.0), (1, 1.0)], Ge, 2.0);
        lp.add(vec![(1, 1.0)], Le, 3.0);
        let (x, z) = optimal(&lp);
        assert!((z - 7.0).abs() < 1e-9);
        assert!((x[0] - 1.0).abs() < 1e-9 && (x[1] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_negative_rhs() {
        // max -x - y, x + y = 1, x - y <= -0.5  ->  x = 0.25, y = 0.75
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![-1.0, -1.0];
        lp.add(vec![(0, 1.0), (1, 1.0)], Eq, 1.0);
        lp.add(vec![(0, 1.0), (1, -1.0)], Le, -0.5);
        let (x, z) = optimal(&lp);
        assert!((z + 1.0).abs() < 1e-9);
        assert!(x[1] - x[0] >= 0.5 - 1e-9);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.add(vec![(0, 1.0)], Ge, 2.0);
        lp.add(vec![(0, 1.0)], Le, 1.0);
        assert_eq!(solve(&lp).unwrap(), LpSolution::Infeasible);

        let mut lp = LinearProgram::new(2);
        lp.objective = vec![1.0, 0.0];
        lp.add(vec![(0, 1.0), (1, -1.0)], Le, 1.0);
        assert_eq!(solve(&lp).unwrap(), LpSolution::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![1.0, 0.0];
        lp.add(vec![(0, 1.0), (1, 1.0)], Eq, 1.0);
        lp.add(vec![(0, 2.0), (1, 2.0)], Eq, 2.0);
        let (x, z) = optimal(&lp);
        assert!((z - 1.0).abs() < 1e-9 && (x[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Classic cycling example for Dantzig's rule (Beale).
        let mut lp = LinearProgram::new(4);
        lp.objective = vec![0.75, -150.0, 0.02, -6.0];
        lp.add(vec![(0, 0.25), (1, -60.0), (2, -0.04), (3, 9.0)], Le, 0.0);
        lp.add(vec![(0, 0.5), (1, -90.0), (2, -0.02), (3, 3.0)], Le, 0.0);
        lp.add(vec![(2, 1.0)], Le, 1.0);
        let (_, z) = optimal(&lp);
        assert!((z - 0.05).abs() < 1e-9);
    }
}
