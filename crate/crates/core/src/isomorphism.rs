//! Local transfer between a delocalized single photon and two separated spins.
//!
//! Each site holds an optical mode (occupancy 0 or 1) and a spin. A local
//! mechanism swaps `|1,↓⟩ ↔ |0,↑⟩`: it absorbs the photon while raising the
//! spin, and creates a photon while lowering it. `|0,↓⟩` and the unused level
//! `|1,↑⟩` are left alone, so the map is a unitary involution.
//!
//! ```text
//! (α|1⟩_A|0⟩_B + β|0⟩_A|1⟩_B) |↓⟩_A|↓⟩_B  ↔  |0⟩_A|0⟩_B (α|↑⟩_A|↓⟩_B + β|↓⟩_A|↑⟩_B)
//! ```

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::{apply, embed, CompositeSpace, LinearOperator, StateVector, Subsystem, SubsystemKind};

const UP: usize = 0;
const DOWN: usize = 1;
const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Site {
    A,
    B,
}

impl Site {
    fn offset(self) -> usize {
        match self {
            Site::A => 0,
            Site::B => 2,
        }
    }
}

/// The four-subsystem layout `photon@A, spin@A, photon@B, spin@B`.
pub fn site_layout() -> CompositeSpace {
    CompositeSpace::new(vec![
        Subsystem::mode("photon@A", 1),
        Subsystem::spin("spin@A"),
        Subsystem::mode("photon@B", 1),
        Subsystem::spin("spin@B"),
    ])
    .expect("fixed layout is valid")
}

/// `spin@A ⊗ spin@B`.
pub fn spin_pair_space() -> CompositeSpace {
    CompositeSpace::new(vec![Subsystem::spin("spin@A"), Subsystem::spin("spin@B")])
        .expect("fixed layout is valid")
}

fn check_layout(space: &CompositeSpace) -> Result<()> {
    let expected = site_layout();
    let ok = space.len() == 4
        && space.subsystems().iter().zip(expected.subsystems()).all(|(a, b)| a.kind == b.kind);
    if ok {
        Ok(())
    } else {
        Err(Error::structural("expected photon/spin layout for sites A and B"))
    }
}

/// Local 4x4 transfer on `(mode, spin)`, local index `occupancy·2 + spin`.
pub fn transfer_matrix() -> DMatrix<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let mut m = DMatrix::zeros(4, 4);
    let photon_down = 2 + DOWN;
    let empty_up = UP;
    m[(empty_up, photon_down)] = one;
    m[(photon_down, empty_up)] = one;
    m[(DOWN, DOWN)] = one;
    m[(2 + UP, 2 + UP)] = one;
    m
}

/// Transfer at one site, identity on the other.
pub fn transfer_unitary(site: Site) -> LinearOperator {
    let off = site.offset();
    embed(&transfer_matrix(), &[off, off + 1], &site_layout()).expect("fixed layout")
}

/// `α|1⟩_A|0⟩_B + β|0⟩_A|1⟩_B` with both spins down.
pub fn photon_state(alpha: Complex64, beta: Complex64) -> Result<StateVector> {
    let norm = alpha.norm_sqr() + beta.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::validation(format!("|α|² + |β|² = {norm}, expected 1")));
    }
    let space = site_layout();
    let mut amps = vec![Complex64::new(0.0, 0.0); space.total_dimension()];
    amps[space.index(&[1, DOWN, 0, DOWN])?] = alpha;
    amps[space.index(&[0, DOWN, 1, DOWN])?] = beta;
    StateVector::new(space, amps)
}

/// Run the local transfers (A, then B) on the delocalized photon.
pub fn photon_to_spins(alpha: Complex64, beta: Complex64) -> Result<StateVector> {
    let photon = photon_state(alpha, beta)?;
    let after_a = apply(&transfer_unitary(Site::A), &photon)?;
    apply(&transfer_unitary(Site::B), &after_a)
}

/// Spin amplitudes of a layout state whose photon modes are empty.
pub fn spins_of(state: &StateVector) -> Result<StateVector> {
    check_layout(state.space())?;
    let space = state.space();
    let mut out = vec![Complex64::new(0.0, 0.0); 4];
    for (idx, amp) in state.amplitudes().iter().enumerate() {
        let d = space.digits(idx);
        if d[0] == 0 && d[2] == 0 {
            out[d[1] * 2 + d[3]] = *amp;
        } else if amp.norm() > NORM_TOL {
            return Err(Error::validation("photon modes are not empty"));
        }
    }
    StateVector::new(spin_pair_space(), out)
}

/// Inverse of [`photon_to_spins`] for a two-spin state in span{|↑↓⟩, |↓↑⟩}.
pub fn spins_to_photon(spins: &StateVector) -> Result<StateVector> {
    let space = spins.space();
    if space.len() != 2 || space.subsystems().iter().any(|s| s.kind != SubsystemKind::SpinHalf) {
        return Err(Error::structural("expected a two-spin state"));
    }
    let a = spins.amplitudes();
    let outside = a[UP * 2 + UP].norm().max(a[DOWN * 2 + DOWN].norm());
    if outside > NORM_TOL {
        return Err(Error::validation(format!(
            "two-spin state has weight outside span{{|↑↓⟩, |↓↑⟩}} (amplitude {outside:e})"
        )));
    }
    let layout = site_layout();
    let mut amps = vec![Complex64::new(0.0, 0.0); layout.total_dimension()];
    amps[layout.index(&[0, UP, 0, DOWN])?] = a[UP * 2 + DOWN];
    amps[layout.index(&[0, DOWN, 0, UP])?] = a[DOWN * 2 + UP];
    let spin_state = StateVector::new(layout, amps)?;
    let after_b = apply(&transfer_unitary(Site::B), &spin_state)?;
    apply(&transfer_unitary(Site::A), &after_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{inner, is_unitary, schmidt_coefficients};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn transfer_swaps_the_single_excitation_levels() {
        let t = transfer_unitary(Site::A);
        let sp = site_layout();
        let out = apply(&t, &StateVector::basis(&sp, &[1, DOWN, 0, DOWN]).unwrap()).unwrap();
        assert_eq!(out, StateVector::basis(&sp, &[0, UP, 0, DOWN]).unwrap());
        let out = apply(&t, &StateVector::basis(&sp, &[0, DOWN, 1, UP]).unwrap()).unwrap();
        assert_eq!(out, StateVector::basis(&sp, &[0, DOWN, 1, UP]).unwrap());
        let twice = t.compose(&t).unwrap();
        assert!(twice.max_abs_diff(&LinearOperator::identity(&sp)).unwrap() < 1e-15);
        assert!(is_unitary(&t, 1e-12));
    }

    #[test]
    fn sites_commute() {
        let ab = transfer_unitary(Site::A).compose(&transfer_unitary(Site::B)).unwrap();
        let ba = transfer_unitary(Site::B).compose(&transfer_unitary(Site::A)).unwrap();
        assert!(ab.max_abs_diff(&ba).unwrap() < 1e-12);
    }

    #[test]
    fn single_branch_photon() {
        let out = photon_to_spins(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(out, StateVector::basis(&site_layout(), &[0, UP, 0, DOWN]).unwrap());
    }

    #[test]
    fn general_amplitudes_move_to_spins() {
        let (al, be) = (c(0.6, 0.0), c(0.0, -0.8));
        let spins = spins_of(&photon_to_spins(al, be).unwrap()).unwrap();
        let expected = StateVector::new(spin_pair_space(), vec![c(0.0, 0.0), al, be, c(0.0, 0.0)]).unwrap();
        assert!(spins.max_abs_diff(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn maximally_entangled_instance() {
        let h = 1.0 / 2f64.sqrt();
        let out = photon_to_spins(c(h, 0.0), c(h, 0.0)).unwrap();
        let sc = schmidt_coefficients(&out, &[0, 1]).unwrap();
        assert!((sc[0] - h).abs() < 1e-12 && (sc[1] - h).abs() < 1e-12);
    }

    #[test]
    fn round_trip_and_errors() {
        let (al, be) = (c(0.28, 0.96 * 0.6), c(0.0, 0.96 * 0.8));
        let spins = spins_of(&photon_to_spins(al, be).unwrap()).unwrap();
        let back = spins_to_photon(&spins).unwrap();
        assert!(back.max_abs_diff(&photon_state(al, be).unwrap()).unwrap() < 1e-12);

        let up_down = StateVector::basis(&spin_pair_space(), &[UP, DOWN]).unwrap();
        let photon = spins_to_photon(&up_down).unwrap();
        assert_eq!(photon, StateVector::basis(&site_layout(), &[1, DOWN, 0, DOWN]).unwrap());

        let up_up = StateVector::basis(&spin_pair_space(), &[UP, UP]).unwrap();
        assert!(matches!(spins_to_photon(&up_up), Err(Error::Validation(_))));
        assert!(matches!(photon_to_spins(c(1.0, 0.0), c(1.0, 0.0)), Err(Error::Validation(_))));
    }

    #[test]
    fn inner_products_are_preserved() {
        let (a1, b1) = (c(0.6, 0.0), c(0.0, 0.8));
        let (a2, b2) = (c(0.0, 1.0 / 2f64.sqrt()), c(1.0 / 2f64.sqrt(), 0.0));
        let lhs = inner(&photon_to_spins(a1, b1).unwrap(), &photon_to_spins(a2, b2).unwrap()).unwrap();
        let rhs = a1.conj() * a2 + b1.conj() * b2;
        assert!((lhs - rhs).norm() < 1e-12);
    }
}
