use serde::{Deserialize, Serialize};

use super::behavior::{BipartiteBehavior, Shape};
use super::simplex::{self, LpOutcome};
use super::strategy::{enumerate_strategies, DeterministicStrategy};
use crate::error::{Error, Result};

/// Per-entry tolerance for accepting a local decomposition.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Minimum violation of a returned certificate.
pub const CERTIFICATE_MARGIN: f64 = 1e-6;
/// Local bound that certificates are normalized to.
pub const CERTIFICATE_BOUND: f64 = 2.0;
const MAX_GRID_LOG2: i32 = 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedStrategy {
    pub strategy: DeterministicStrategy,
    pub weight: f64,
}

/// Linear functional `Σ c(a,b,x,y)·P(a,b|x,y) ≤ bound` satisfied by every
/// local behavior. Coefficients are dyadic rationals `numerators[i] / 2^k`
/// so that vertex values are checked in integer arithmetic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub shape: Shape,
    pub coefficients: Vec<f64>,
    pub bound: f64,
    pub input_value: f64,
    pub numerators: Vec<i64>,
    pub denominator_log2: u32,
    /// Largest `v` with `v·P + (1−v)·uniform` local.
    pub critical_visibility: f64,
}

impl Certificate {
    pub fn evaluate(&self, behavior: &BipartiteBehavior) -> Result<f64> {
        if behavior.shape() != self.shape {
            return Err(Error::structural("certificate and behavior shapes differ"));
        }
        Ok(self.coefficients.iter().zip(behavior.table()).map(|(c, p)| c * p).sum())
    }

    /// Exact value on a deterministic strategy, as a numerator over `2^k`.
    pub fn vertex_numerator(&self, strategy: &DeterministicStrategy) -> i128 {
        strategy.support(self.shape).map(|i| self.numerators[i] as i128).sum()
    }

    pub fn bound_numerator(&self) -> i128 {
        (self.bound * (1u64 << self.denominator_log2) as f64) as i128
    }

    /// Checks the bound on every vertex exactly and the violation by the input.
    pub fn verify(&self, behavior: &BipartiteBehavior) -> Result<()> {
        let bound = self.bound_numerator();
        for s in enumerate_strategies(self.shape)? {
            if self.vertex_numerator(&s) > bound {
                return Err(Error::Certificate(format!("strategy {s:?} exceeds the local bound")));
            }
        }
        let value = self.evaluate(behavior)?;
        if value <= self.bound + CERTIFICATE_MARGIN {
            return Err(Error::Certificate(format!(
                "input value {value} does not exceed the bound {} by {CERTIFICATE_MARGIN}",
                self.bound
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum MembershipResult {
    Feasible { weights: Vec<WeightedStrategy> },
    Infeasible { certificate: Certificate },
}

impl MembershipResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, MembershipResult::Feasible { .. })
    }

    pub fn verdict(&self) -> &'static str {
        match self {
            MembershipResult::Feasible { .. } => "feasible",
            MembershipResult::Infeasible { .. } => "infeasible",
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            MembershipResult::Infeasible { certificate } => Some(certificate),
            MembershipResult::Feasible { .. } => None,
        }
    }

    pub fn weights(&self) -> Option<&[WeightedStrategy]> {
        match self {
            MembershipResult::Feasible { weights } => Some(weights),
            MembershipResult::Infeasible { .. } => None,
        }
    }
}

/// `Σ wᵢ·D_i` for a list of weighted strategies.
pub fn reconstruct(shape: Shape, weights: &[WeightedStrategy]) -> Vec<f64> {
    let mut table = vec![0.0; shape.entries()];
    for w in weights {
        for i in w.strategy.support(shape) {
            table[i] += w.weight;
        }
    }
    table
}

/// Decides whether a behavior is a mixture of deterministic strategies.
///
/// Solves `max v` over weights `w ≥ 0` with `Σ w_λ·D_λ = U + v·(P − U)`,
/// `v ≤ 1`, where `U` is the uniform behavior. At `v = 1` the weights
/// decompose `P`. Otherwise the optimal dual gives a functional that is at
/// most the critical visibility on every vertex and at least 1 on `P`; it is
/// shifted to vanish on `U`, scaled to a local bound of 2, rounded to a
/// dyadic grid and checked on every vertex in integer arithmetic.
pub fn lhv_membership(behavior: &BipartiteBehavior) -> Result<MembershipResult> {
    let shape = behavior.shape();
    let strategies = enumerate_strategies(shape)?;
    let n = strategies.len();
    let k = shape.entries();
    let u = 1.0 / (shape.a * shape.b) as f64;
    let p = behavior.table();

    // Columns: w_0..w_{n−1}, v, slack t. Rows: table entries, then v + t = 1.
    let mut a = vec![vec![0.0; n + 2]; k + 1];
    for (j, s) in strategies.iter().enumerate() {
        for i in s.support(shape) {
            a[i][j] = 1.0;
        }
    }
    for i in 0..k {
        a[i][n] = -(p[i] - u);
    }
    a[k][n] = 1.0;
    a[k][n + 1] = 1.0;
    let mut b = vec![u; k + 1];
    b[k] = 1.0;
    let mut c = vec![0.0; n + 2];
    c[n] = 1.0;

    let solution = match simplex::solve(&a, &b, &c)? {
        LpOutcome::Optimal(sol) => sol,
        other => return Err(Error::Certificate(format!("visibility LP did not reach an optimum: {other:?}"))),
    };
    let visibility = solution.objective;

    if visibility >= 1.0 - FEASIBILITY_TOL {
        let raw: Vec<f64> = solution.x[..n].iter().map(|w| w.max(0.0)).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<WeightedStrategy> = strategies
            .into_iter()
            .zip(raw)
            .filter(|(_, w)| *w > 0.0)
            .map(|(strategy, w)| WeightedStrategy { strategy, weight: w / total })
            .collect();
        let rebuilt = reconstruct(shape, &weights);
        let err = rebuilt.iter().zip(p).map(|(r, q)| (r - q).abs()).fold(0.0, f64::max);
        if err > FEASIBILITY_TOL * 10.0 {
            return Err(Error::Certificate(format!("local decomposition misses the table by {err:e}")));
        }
        return Ok(MembershipResult::Feasible { weights });
    }

    let mut coeffs: Vec<f64> = solution.duals[..k].iter().map(|y| -y).collect();
    let at_uniform: f64 = coeffs.iter().sum::<f64>() * u;
    let shift = -at_uniform / shape.blocks() as f64;
    coeffs.iter_mut().for_each(|c| *c += shift);
    let vertex_max = strategies
        .iter()
        .map(|s| s.support(shape).map(|i| coeffs[i]).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    if vertex_max <= 1e-12 {
        return Err(Error::Certificate("dual functional is flat on the local polytope".into()));
    }
    let scale = CERTIFICATE_BOUND / vertex_max;
    coeffs.iter_mut().for_each(|c| *c *= scale);

    let largest = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let grid_log2 = (50 - largest.max(1.0).log2().ceil() as i32).min(MAX_GRID_LOG2);
    if grid_log2 < 1 {
        return Err(Error::Certificate(format!("certificate coefficients too large ({largest:e})")));
    }
    let grid = (1u64 << grid_log2) as f64;
    let mut numerators: Vec<i64> = coeffs.iter().map(|c| (c * grid).round() as i64).collect();
    let exact_max = strategies
        .iter()
        .map(|s| s.support(shape).map(|i| numerators[i] as i128).sum::<i128>())
        .max()
        .expect("at least one strategy");
    // Constant shift on block (0,0) moves every vertex value by the same amount.
    let target = (CERTIFICATE_BOUND * grid) as i128;
    let delta = i64::try_from(target - exact_max)
        .map_err(|_| Error::Certificate("certificate shift overflows".into()))?;
    for a_out in 0..shape.a {
        for b_out in 0..shape.b {
            numerators[shape.index(a_out, b_out, 0, 0)] += delta;
        }
    }
    let coefficients: Vec<f64> = numerators.iter().map(|&m| m as f64 / grid).collect();
    let input_value = coefficients.iter().zip(p).map(|(c, q)| c * q).sum();
    let certificate = Certificate {
        shape,
        coefficients,
        bound: CERTIFICATE_BOUND,
        input_value,
        numerators,
        denominator_log2: grid_log2 as u32,
        critical_visibility: visibility,
    };
    certificate.verify(behavior)?;
    Ok(MembershipResult::Infeasible { certificate })
}
