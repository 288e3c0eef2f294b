use serde::{Deserialize, Serialize};

use super::strategy::DeterministicStrategy;
use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-10;
const SIGNALING_TOL: f64 = 1e-9;
const RANGE_TOL: f64 = 1e-12;

/// Shape of a two-party scenario: setting and outcome counts per party.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Shape {
    pub x: usize,
    pub y: usize,
    pub a: usize,
    pub b: usize,
}

impl Shape {
    pub const CHSH: Shape = Shape { x: 2, y: 2, a: 2, b: 2 };

    pub fn new(x: usize, y: usize, a: usize, b: usize) -> Result<Self> {
        if x == 0 || y == 0 || a == 0 || b == 0 {
            return Err(Error::validation("setting and outcome counts must be positive"));
        }
        Ok(Shape { x, y, a, b })
    }

    pub fn entries(&self) -> usize {
        self.x * self.y * self.a * self.b
    }

    pub fn blocks(&self) -> usize {
        self.x * self.y
    }

    /// Row-major position of `P(a,b|x,y)`.
    #[inline]
    pub fn index(&self, a: usize, b: usize, x: usize, y: usize) -> usize {
        ((x * self.y + y) * self.a + a) * self.b + b
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBehavior {
    settings: [usize; 2],
    outcomes: [usize; 2],
    table: Vec<f64>,
}

/// Conditional outcome table `P(a,b|x,y)`, stored row-major over
/// `(x, y, a, b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBehavior", into = "RawBehavior")]
pub struct BipartiteBehavior {
    shape: Shape,
    table: Vec<f64>,
}

impl TryFrom<RawBehavior> for BipartiteBehavior {
    type Error = Error;

    fn try_from(raw: RawBehavior) -> Result<Self> {
        let shape = Shape::new(raw.settings[0], raw.settings[1], raw.outcomes[0], raw.outcomes[1])?;
        BipartiteBehavior::new(shape, raw.table)
    }
}

impl From<BipartiteBehavior> for RawBehavior {
    fn from(b: BipartiteBehavior) -> Self {
        RawBehavior {
            settings: [b.shape.x, b.shape.y],
            outcomes: [b.shape.a, b.shape.b],
            table: b.table,
        }
    }
}

impl BipartiteBehavior {
    /// Validates normalization per setting pair and no-signaling.
    pub fn new(shape: Shape, table: Vec<f64>) -> Result<Self> {
        if table.len() != shape.entries() {
            return Err(Error::structural(format!(
                "table has {} entries, shape needs {}",
                table.len(),
                shape.entries()
            )));
        }
        if let Some(p) = table.iter().find(|p| !p.is_finite() || **p < -RANGE_TOL || **p > 1.0 + RANGE_TOL) {
            return Err(Error::validation(format!("table entry {p} outside [0, 1]")));
        }
        let behavior = BipartiteBehavior { shape, table };
        for x in 0..shape.x {
            for y in 0..shape.y {
                let s: f64 = (0..shape.a)
                    .flat_map(|a| (0..shape.b).map(move |b| (a, b)))
                    .map(|(a, b)| behavior.p(a, b, x, y))
                    .sum();
                if (s - 1.0).abs() > SUM_TOL {
                    return Err(Error::validation(format!("P(·,·|{x},{y}) sums to {s}")));
                }
            }
        }
        let gap = behavior.signaling_gap();
        if gap > SIGNALING_TOL {
            return Err(Error::validation(format!("behavior signals (marginal gap {gap:e})")));
        }
        Ok(behavior)
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    #[inline]
    pub fn p(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.table[self.shape.index(a, b, x, y)]
    }

    pub fn alice_marginal(&self, a: usize, x: usize, y: usize) -> f64 {
        (0..self.shape.b).map(|b| self.p(a, b, x, y)).sum()
    }

    pub fn bob_marginal(&self, b: usize, x: usize, y: usize) -> f64 {
        (0..self.shape.a).map(|a| self.p(a, b, x, y)).sum()
    }

    /// Largest change of one party's marginal under the other party's setting.
    pub fn signaling_gap(&self) -> f64 {
        let s = self.shape;
        let mut gap: f64 = 0.0;
        for x in 0..s.x {
            for a in 0..s.a {
                let m0 = self.alice_marginal(a, x, 0);
                for y in 1..s.y {
                    gap = gap.max((self.alice_marginal(a, x, y) - m0).abs());
                }
            }
        }
        for y in 0..s.y {
            for b in 0..s.b {
                let m0 = self.bob_marginal(b, 0, y);
                for x in 1..s.x {
                    gap = gap.max((self.bob_marginal(b, x, y) - m0).abs());
                }
            }
        }
        gap
    }

    /// Behavior of a single deterministic strategy.
    pub fn deterministic(shape: Shape, strategy: &DeterministicStrategy) -> Result<Self> {
        strategy.check(shape)?;
        let mut table = vec![0.0; shape.entries()];
        for idx in strategy.support(shape) {
            table[idx] = 1.0;
        }
        BipartiteBehavior::new(shape, table)
    }

    /// `P(a,b|x,y) = 1/(A·B)`.
    pub fn uniform(shape: Shape) -> Self {
        let v = 1.0 / (shape.a * shape.b) as f64;
        BipartiteBehavior { shape, table: vec![v; shape.entries()] }
    }

    /// Popescu–Rohrlich box: `a ⊕ b = x·y` with uniform marginals.
    pub fn pr_box() -> Self {
        let shape = Shape::CHSH;
        let mut table = vec![0.0; shape.entries()];
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    let b = a ^ (x & y);
                    table[shape.index(a, b, x, y)] = 0.5;
                }
            }
        }
        BipartiteBehavior { shape, table }
    }

    /// Convex combination `Σ wᵢ·Pᵢ` of behaviors with a common shape.
    pub fn mixture(parts: &[(f64, &BipartiteBehavior)]) -> Result<Self> {
        let shape = parts.first().ok_or_else(|| Error::validation("empty mixture"))?.1.shape;
        let mut table = vec![0.0; shape.entries()];
        for (w, part) in parts {
            if part.shape != shape {
                return Err(Error::structural("mixture of behaviors with different shapes"));
            }
            if *w < 0.0 {
                return Err(Error::validation("negative mixture weight"));
            }
            for (t, p) in table.iter_mut().zip(&part.table) {
                *t += w * p;
            }
        }
        BipartiteBehavior::new(shape, table)
    }

    pub fn max_abs_diff(&self, other: &BipartiteBehavior) -> Result<f64> {
        if self.shape != other.shape {
            return Err(Error::structural("behaviors have different shapes"));
        }
        Ok(self.table.iter().zip(&other.table).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }
}
