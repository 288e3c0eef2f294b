use serde::{Deserialize, Serialize};

use super::behavior::Shape;
use crate::error::{Error, Result};

/// Upper bound on `A^X · B^Y` for vertex enumeration.
pub const MAX_STRATEGIES: u128 = 10_000_000;

/// Local deterministic assignment: Alice answers `alice[x]`, Bob `bob[y]`.
/// These are the vertices of the local polytope.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    pub alice: Vec<usize>,
    pub bob: Vec<usize>,
}

impl DeterministicStrategy {
    pub fn check(&self, shape: Shape) -> Result<()> {
        if self.alice.len() != shape.x || self.bob.len() != shape.y {
            return Err(Error::structural("strategy does not match the setting counts"));
        }
        if self.alice.iter().any(|&a| a >= shape.a) || self.bob.iter().any(|&b| b >= shape.b) {
            return Err(Error::validation("strategy assigns an outcome out of range"));
        }
        Ok(())
    }

    /// Table positions holding a 1, one per setting pair.
    pub fn support(&self, shape: Shape) -> impl Iterator<Item = usize> + '_ {
        (0..shape.x).flat_map(move |x| {
            (0..shape.y).map(move |y| shape.index(self.alice[x], self.bob[y], x, y))
        })
    }
}

/// All `A^X · B^Y` strategies in lexicographic order of
/// `(alice[0], …, alice[X−1], bob[0], …, bob[Y−1])`.
pub fn enumerate_strategies(shape: Shape) -> Result<Vec<DeterministicStrategy>> {
    let count = (shape.a as u128)
        .checked_pow(shape.x as u32)
        .and_then(|n| n.checked_mul((shape.b as u128).checked_pow(shape.y as u32)?))
        .filter(|&n| n <= MAX_STRATEGIES)
        .ok_or_else(|| {
            Error::Capacity(format!(
                "{}^{} · {}^{} strategies exceed the limit of {MAX_STRATEGIES}",
                shape.a, shape.x, shape.b, shape.y
            ))
        })? as usize;
    let radices: Vec<usize> =
        std::iter::repeat_n(shape.a, shape.x).chain(std::iter::repeat_n(shape.b, shape.y)).collect();
    let mut digits = vec![0usize; radices.len()];
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(DeterministicStrategy {
            alice: digits[..shape.x].to_vec(),
            bob: digits[shape.x..].to_vec(),
        });
        for k in (0..digits.len()).rev() {
            digits[k] += 1;
            if digits[k] < radices[k] {
                break;
            }
            digits[k] = 0;
        }
    }
    Ok(out)
}
