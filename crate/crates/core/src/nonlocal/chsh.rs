use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::behavior::{BipartiteBehavior, Shape};
use crate::error::{Error, Result};
use crate::qcore::{StateVector, SubsystemKind};

/// Coarse grid step for `chsh_max`.
pub const GRID_STEP: f64 = PI / 12.0;
/// Bracket width at which golden-section refinement stops.
pub const REFINE_TOL: f64 = 1e-6;
/// Coordinate sweeps of the refinement.
pub const REFINE_SWEEPS: usize = 3;

/// Direction `n = (sinθ cosφ, sinθ sinφ, cosθ)` of a dichotomic spin
/// observable `n·σ`. Outcome 0 is the `+1` eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlochAngles {
    pub theta: f64,
    pub phi: f64,
}

impl BlochAngles {
    pub fn new(theta: f64, phi: f64) -> Self {
        BlochAngles { theta, phi }
    }

    pub fn direction(&self) -> Vector3<f64> {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        Vector3::new(st * cp, st * sp, ct)
    }

    /// Angles of a nonzero vector, `φ` in `[0, 2π)`.
    pub fn from_direction(v: &Vector3<f64>) -> Self {
        let r = v.norm();
        if r == 0.0 {
            return BlochAngles::new(0.0, 0.0);
        }
        let theta = (v.z / r).clamp(-1.0, 1.0).acos();
        let phi = v.y.atan2(v.x).rem_euclid(2.0 * PI);
        BlochAngles::new(theta, phi)
    }

    /// Spectral projector of `n·σ` onto `+1` (outcome 0) or `−1` (outcome 1).
    pub fn projector(&self, outcome: usize) -> Matrix2<Complex64> {
        let n = self.direction();
        let s = if outcome == 0 { 0.5 } else { -0.5 };
        let c = |re: f64, im: f64| Complex64::new(re, im);
        Matrix2::new(
            c(0.5 + s * n.z, 0.0),
            c(s * n.x, -s * n.y),
            c(s * n.x, s * n.y),
            c(0.5 - s * n.z, 0.0),
        )
    }
}

/// Measurement directions for each setting of each party.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinMeasurementAngles {
    pub alice: Vec<BlochAngles>,
    pub bob: Vec<BlochAngles>,
}

impl SpinMeasurementAngles {
    pub fn new(alice: Vec<BlochAngles>, bob: Vec<BlochAngles>) -> Result<Self> {
        let angles = SpinMeasurementAngles { alice, bob };
        angles.validate()?;
        Ok(angles)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alice.is_empty() || self.bob.is_empty() {
            return Err(Error::validation("each party needs at least one setting"));
        }
        if self.alice.iter().chain(&self.bob).any(|a| !a.theta.is_finite() || !a.phi.is_finite()) {
            return Err(Error::validation("measurement angles must be finite"));
        }
        Ok(())
    }

    /// Standard optimal settings for `(|↑↓⟩ + |↓↑⟩)/√2`: Alice along z and x,
    /// Bob along the two diagonals of the x–z plane.
    pub fn tsirelson() -> Self {
        SpinMeasurementAngles {
            alice: vec![BlochAngles::new(0.0, 0.0), BlochAngles::new(PI / 2.0, 0.0)],
            bob: vec![BlochAngles::new(3.0 * PI / 4.0, 0.0), BlochAngles::new(3.0 * PI / 4.0, PI)],
        }
    }
}

fn check_two_spins(state: &StateVector) -> Result<()> {
    let space = state.space();
    if space.len() != 2 || space.subsystems().iter().any(|s| s.kind != SubsystemKind::SpinHalf) {
        return Err(Error::structural("expected a state on spin ⊗ spin"));
    }
    state.require_unit("two-spin state")
}

fn amplitudes(state: &StateVector) -> [Complex64; 4] {
    let a = state.amplitudes();
    [a[0], a[1], a[2], a[3]]
}

/// Born-rule table for local spin measurements on a two-spin state.
pub fn behavior_from_state(state: &StateVector, angles: &SpinMeasurementAngles) -> Result<BipartiteBehavior> {
    check_two_spins(state)?;
    angles.validate()?;
    let psi = amplitudes(state);
    let shape = Shape::new(angles.alice.len(), angles.bob.len(), 2, 2)?;
    let mut table = vec![0.0; shape.entries()];
    for (x, ax) in angles.alice.iter().enumerate() {
        for (y, by) in angles.bob.iter().enumerate() {
            for a in 0..2 {
                let pa = ax.projector(a);
                for b in 0..2 {
                    let pb = by.projector(b);
                    // ⟨ψ|Pa⊗Pb|ψ⟩ with index 2i + j.
                    let mut acc = Complex64::new(0.0, 0.0);
                    for i in 0..2 {
                        for j in 0..2 {
                            for k in 0..2 {
                                for l in 0..2 {
                                    acc += psi[2 * i + j].conj() * pa[(i, k)] * pb[(j, l)] * psi[2 * k + l];
                                }
                            }
                        }
                    }
                    table[shape.index(a, b, x, y)] = acc.re.clamp(0.0, 1.0);
                }
            }
        }
    }
    BipartiteBehavior::new(shape, table)
}

/// `E(0,0) + E(0,1) + E(1,0) − E(1,1)` with `E(x,y) = Σ (−1)^{a+b} P(a,b|x,y)`.
pub fn chsh_value(behavior: &BipartiteBehavior) -> Result<f64> {
    if behavior.shape() != Shape::CHSH {
        return Err(Error::structural("CHSH needs two settings and two outcomes per party"));
    }
    let e = |x, y| {
        behavior.p(0, 0, x, y) + behavior.p(1, 1, x, y) - behavior.p(0, 1, x, y) - behavior.p(1, 0, x, y)
    };
    Ok(e(0, 0) + e(0, 1) + e(1, 0) - e(1, 1))
}

/// Correlation matrix `T_ij = ⟨ψ|σ_i ⊗ σ_j|ψ⟩`.
pub fn correlation_matrix(state: &StateVector) -> Result<Matrix3<f64>> {
    check_two_spins(state)?;
    let psi = amplitudes(state);
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let paulis = [
        Matrix2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)),
        Matrix2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)),
        Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)),
    ];
    Ok(Matrix3::from_fn(|r, s| {
        let (sa, sb) = (&paulis[r], &paulis[s]);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        acc += psi[2 * i + j].conj() * sa[(i, k)] * sb[(j, l)] * psi[2 * k + l];
                    }
                }
            }
        }
        acc.re
    }))
}

/// Best CHSH value for fixed Bob directions, with Alice chosen optimally:
/// `‖T(b₀+b₁)‖ + ‖T(b₀−b₁)‖`.
fn bob_objective(t: &Matrix3<f64>, b: &[f64; 4]) -> f64 {
    let b0 = BlochAngles::new(b[0], b[1]).direction();
    let b1 = BlochAngles::new(b[2], b[3]).direction();
    (t * (b0 + b1)).norm() + (t * (b0 - b1)).norm()
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > REFINE_TOL {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
    }
    (lo + hi) / 2.0
}

/// Maximizes the CHSH value over local spin measurements.
///
/// Bob's two directions are searched on a grid of step `π/12` in `θ ∈ [0, π]`
/// and `φ ∈ [0, 2π)`, with Alice's best reply computed in closed form from
/// the correlation matrix. The best grid point is refined by golden-section
/// search on each of Bob's four angles in turn (bracket `±π/12`, stopping
/// width `1e-6`, [`REFINE_SWEEPS`] sweeps). The returned value is recomputed
/// from the Born-rule behavior at the returned angles.
pub fn chsh_max(state: &StateVector) -> Result<(f64, SpinMeasurementAngles)> {
    let t = correlation_matrix(state)?;
    let thetas: Vec<f64> = (0..=12).map(|k| k as f64 * GRID_STEP).collect();
    let phis: Vec<f64> = (0..24).map(|k| k as f64 * GRID_STEP).collect();
    let dirs: Vec<(f64, f64, Vector3<f64>)> = thetas
        .iter()
        .flat_map(|&th| phis.iter().map(move |&ph| (th, ph, BlochAngles::new(th, ph).direction())))
        .collect();

    let mut best = (f64::NEG_INFINITY, [0.0; 4]);
    for (t0, p0, b0) in &dirs {
        for (t1, p1, b1) in &dirs {
            let v = (t * (b0 + b1)).norm() + (t * (b0 - b1)).norm();
            if v > best.0 {
                best = (v, [*t0, *p0, *t1, *p1]);
            }
        }
    }

    let mut b = best.1;
    for _ in 0..REFINE_SWEEPS {
        for k in 0..4 {
            let centre = b[k];
            let arg = golden_max(
                |s| {
                    let mut trial = b;
                    trial[k] = s;
                    bob_objective(&t, &trial)
                },
                centre - GRID_STEP,
                centre + GRID_STEP,
            );
            let mut trial = b;
            trial[k] = arg;
            if bob_objective(&t, &trial) > bob_objective(&t, &b) {
                b = trial;
            }
        }
    }

    let b0 = BlochAngles::new(b[0], b[1]).direction();
    let b1 = BlochAngles::new(b[2], b[3]).direction();
    let alice_dir = |v: Vector3<f64>| {
        if v.norm() > 1e-12 {
            BlochAngles::from_direction(&v)
        } else {
            BlochAngles::new(0.0, 0.0)
        }
    };
    let angles = SpinMeasurementAngles {
        alice: vec![alice_dir(t * (b0 + b1)), alice_dir(t * (b0 - b1))],
        bob: vec![BlochAngles::from_direction(&b0), BlochAngles::from_direction(&b1)],
    };
    let value = chsh_value(&behavior_from_state(state, &angles)?)?;
    Ok((value, angles))
}
