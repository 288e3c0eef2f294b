//! Dense two-phase simplex for `max cᵀx` subject to `Ax = b`, `x ≥ 0`, `b ≥ 0`.
//!
//! Every row gets an artificial column, so the initial basis is the identity
//! and the artificial block of the final tableau holds `B⁻¹`. Entering and
//! leaving variables follow Bland's rule.

use crate::error::{Error, Result};

/// Smallest pivot magnitude accepted.
pub const MIN_PIVOT: f64 = 1e-13;
const COST_TOL: f64 = 1e-11;
const ZERO: f64 = 1e-14;
const ELIGIBLE: f64 = 1e-11;
const PHASE1_TOL: f64 = 1e-9;
const MAX_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible { residual: f64 },
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Dual values `yᵀ = c_Bᵀ B⁻¹`, one per row.
    pub duals: Vec<f64>,
}

struct Tableau {
    rows: usize,
    structural: usize,
    a: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn columns(&self) -> usize {
        self.structural + self.rows
    }

    fn pivot(&mut self, r: usize, c: usize) -> Result<()> {
        let p = self.a[r][c];
        if p.abs() < MIN_PIVOT {
            return Err(Error::IllConditioned { pivot: p, row: r, column: c });
        }
        let inv = 1.0 / p;
        for v in self.a[r].iter_mut() {
            *v *= inv;
        }
        self.rhs[r] *= inv;
        self.a[r][c] = 1.0;
        let pivot_row = self.a[r].clone();
        let pivot_rhs = self.rhs[r];
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.a[i][c];
            if f == 0.0 {
                continue;
            }
            for (v, pv) in self.a[i].iter_mut().zip(&pivot_row) {
                *v -= f * pv;
                if v.abs() < ZERO {
                    *v = 0.0;
                }
            }
            self.a[i][c] = 0.0;
            self.rhs[i] -= f * pivot_rhs;
            if self.rhs[i].abs() < ZERO {
                self.rhs[i] = 0.0;
            }
        }
        self.basis[r] = c;
        Ok(())
    }

    fn reduced_cost(&self, cost: &[f64], j: usize) -> f64 {
        let mut d = cost[j];
        for i in 0..self.rows {
            d -= cost[self.basis[i]] * self.a[i][j];
        }
        d
    }

    /// Runs primal simplex iterations; `Ok(false)` means unbounded.
    fn optimize(&mut self, cost: &[f64], may_enter: impl Fn(usize) -> bool) -> Result<bool> {
        for _ in 0..MAX_ITERATIONS {
            let entering = (0..self.columns())
                .filter(|&j| may_enter(j) && !self.basis.contains(&j))
                .find(|&j| self.reduced_cost(cost, j) > COST_TOL);
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let aij = self.a[i][c];
                if aij <= ELIGIBLE {
                    continue;
                }
                let ratio = self.rhs[i] / aij;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((k, best)) => {
                        if ratio < best - ZERO || (ratio <= best + ZERO && self.basis[i] < self.basis[k]) {
                            Some((i, ratio))
                        } else {
                            Some((k, best))
                        }
                    }
                };
            }
            match leave {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, c)?,
            }
        }
        Err(Error::validation("simplex iteration limit reached"))
    }
}

/// Solves `max cᵀx` s.t. `Ax = b`, `x ≥ 0`. `a` is given row-wise.
pub fn solve(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<LpOutcome> {
    let rows = a.len();
    let structural = c.len();
    if b.len() != rows || a.iter().any(|r| r.len() != structural) {
        return Err(Error::structural("LP dimensions do not agree"));
    }
    if b.iter().any(|v| *v < 0.0 || !v.is_finite()) {
        return Err(Error::validation("LP right-hand side must be finite and nonnegative"));
    }
    let mut t = Tableau {
        rows,
        structural,
        a: a
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row = r.clone();
                row.extend((0..rows).map(|k| if k == i { 1.0 } else { 0.0 }));
                row
            })
            .collect(),
        rhs: b.to_vec(),
        basis: (structural..structural + rows).collect(),
    };

    let phase1: Vec<f64> = (0..t.columns()).map(|j| if j < structural { 0.0 } else { -1.0 }).collect();
    t.optimize(&phase1, |_| true)?;
    let residual: f64 = (0..rows).filter(|&i| t.basis[i] >= structural).map(|i| t.rhs[i]).sum();
    if residual > PHASE1_TOL {
        return Ok(LpOutcome::Infeasible { residual });
    }

    // Drive zero-level artificials out; rows that cannot be cleared are redundant.
    for r in 0..rows {
        if t.basis[r] < structural {
            continue;
        }
        let col = (0..structural)
            .filter(|j| !t.basis.contains(j))
            .max_by(|&j, &k| t.a[r][j].abs().total_cmp(&t.a[r][k].abs()).then(k.cmp(&j)));
        if let Some(j) = col {
            if t.a[r][j].abs() > 1e-9 {
                t.pivot(r, j)?;
            }
        }
    }

    let mut cost = c.to_vec();
    cost.extend(std::iter::repeat_n(0.0, rows));
    if !t.optimize(&cost, |j| j < structural)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut x = vec![0.0; structural];
    for (i, &j) in t.basis.iter().enumerate() {
        if j < structural {
            x[j] = t.rhs[i];
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    let duals = (0..rows)
        .map(|k| (0..rows).map(|i| cost[t.basis[i]] * t.a[i][structural + k]).sum())
        .collect();
    Ok(LpOutcome::Optimal(LpSolution { x, objective, duals }))
}
