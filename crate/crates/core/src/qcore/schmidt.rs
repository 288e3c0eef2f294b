use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::StateVector;
use crate::error::{Error, Result};

/// Schmidt coefficients of `state` across the cut `left | rest`, sorted in
/// decreasing order. `left` lists subsystem indices in any order.
pub fn schmidt_coefficients(state: &StateVector, left: &[usize]) -> Result<Vec<f64>> {
    let space = state.space();
    for (i, &k) in left.iter().enumerate() {
        if k >= space.len() || left[..i].contains(&k) {
            return Err(Error::structural(format!("invalid cut subsystem {k}")));
        }
    }
    let right: Vec<usize> = (0..space.len()).filter(|k| !left.contains(k)).collect();
    if left.is_empty() || right.is_empty() {
        return Err(Error::structural("cut must leave subsystems on both sides"));
    }
    let rows: usize = left.iter().map(|&k| space.dims()[k]).product();
    let cols: usize = right.iter().map(|&k| space.dims()[k]).product();
    let fold = |idx: usize, part: &[usize]| {
        part.iter().fold(0, |acc, &k| acc * space.dims()[k] + space.digit(idx, k))
    };
    let mut m = DMatrix::<Complex64>::zeros(rows, cols);
    for (idx, amp) in state.amplitudes().iter().enumerate() {
        m[(fold(idx, left), fold(idx, &right))] = *amp;
    }
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::space::{CompositeSpace, Subsystem};

    #[test]
    fn bell_state_has_equal_coefficients() {
        let sp = CompositeSpace::new(vec![Subsystem::spin("a"), Subsystem::spin("b")]).unwrap();
        let h = 1.0 / 2f64.sqrt();
        let z = Complex64::new(0.0, 0.0);
        let st = StateVector::new(sp, vec![z, Complex64::new(h, 0.0), Complex64::new(0.0, h), z]).unwrap();
        let sc = schmidt_coefficients(&st, &[0]).unwrap();
        assert!((sc[0] - h).abs() < 1e-14 && (sc[1] - h).abs() < 1e-14);
    }

    #[test]
    fn product_state_has_single_coefficient() {
        let sp = CompositeSpace::new(vec![Subsystem::spin("a"), Subsystem::position("b", 3)]).unwrap();
        let st = StateVector::basis(&sp, &[1, 2]).unwrap();
        let sc = schmidt_coefficients(&st, &[1]).unwrap();
        assert!((sc[0] - 1.0).abs() < 1e-14);
        assert!(sc[1].abs() < 1e-14);
    }

    #[test]
    fn rejects_trivial_cut() {
        let sp = CompositeSpace::new(vec![Subsystem::spin("a")]).unwrap();
        let st = StateVector::basis(&sp, &[0]).unwrap();
        assert!(schmidt_coefficients(&st, &[0]).is_err());
    }
}
