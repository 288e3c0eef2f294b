use nalgebra::DVector;
use num_complex::Complex64;

use super::space::CompositeSpace;
use crate::error::{Error, Result};

/// Tolerance on `|‖ψ‖² − 1|` for the unit-norm flag.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// Dense pure state over a [`CompositeSpace`].
///
/// Unnormalized vectors are allowed; `is_unit()` reports whether the unit-norm
/// flag is set. Constructors set the flag from the actual norm; operations
/// that cannot guarantee norm preservation clear it.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: CompositeSpace,
    amplitudes: DVector<Complex64>,
    unit: bool,
}

impl StateVector {
    pub fn new(space: CompositeSpace, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != space.total_dimension() {
            return Err(Error::structural(format!(
                "amplitude count {} does not match space dimension {}",
                amplitudes.len(),
                space.total_dimension()
            )));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::validation("amplitudes must be finite"));
        }
        Ok(Self::from_vector(space, DVector::from_vec(amplitudes)))
    }

    pub(crate) fn from_vector(space: CompositeSpace, amplitudes: DVector<Complex64>) -> Self {
        let unit = (amplitudes.norm_squared() - 1.0).abs() <= UNIT_NORM_TOL;
        StateVector { space, amplitudes, unit }
    }

    pub(crate) fn with_flag(space: CompositeSpace, amplitudes: DVector<Complex64>, unit: bool) -> Self {
        StateVector { space, amplitudes, unit }
    }

    /// Product basis state with the given per-subsystem digits.
    pub fn basis(space: &CompositeSpace, digits: &[usize]) -> Result<Self> {
        let idx = space.index(digits)?;
        Self::basis_index(space, idx)
    }

    pub fn basis_index(space: &CompositeSpace, index: usize) -> Result<Self> {
        if index >= space.total_dimension() {
            return Err(Error::structural(format!(
                "basis index {index} out of range for dimension {}",
                space.total_dimension()
            )));
        }
        let mut amps = DVector::zeros(space.total_dimension());
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { space: space.clone(), amplitudes: amps, unit: true })
    }

    pub fn zero(space: &CompositeSpace) -> Self {
        StateVector {
            space: space.clone(),
            amplitudes: DVector::zeros(space.total_dimension()),
            unit: false,
        }
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.amplitudes.as_slice()
    }

    pub(crate) fn vector(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, digits: &[usize]) -> Result<Complex64> {
        Ok(self.amplitudes[self.space.index(digits)?])
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_unit(&self) -> bool {
        self.unit
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn require_unit(&self, what: &str) -> Result<()> {
        if self.unit {
            Ok(())
        } else {
            Err(Error::validation(format!(
                "{what} must be unit norm (norm² = {})",
                self.norm_sqr()
            )))
        }
    }

    /// `ψ / ‖ψ‖`; fails on a (numerically) zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 <= 1e-300 {
            return Err(Error::NullBranch { norm_sqr: n2 });
        }
        let amps = self.amplitudes.unscale(n2.sqrt());
        Ok(StateVector::with_flag(self.space.clone(), amps, true))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let unit = self.unit && (factor.norm_sqr() - 1.0).abs() <= UNIT_NORM_TOL;
        StateVector::with_flag(self.space.clone(), &self.amplitudes * factor, unit)
    }

    /// Entrywise sum; spaces must match.
    pub fn add(&self, other: &StateVector) -> Result<Self> {
        self.require_same_space(other)?;
        Ok(StateVector::from_vector(self.space.clone(), &self.amplitudes + &other.amplitudes))
    }

    pub(crate) fn require_same_space(&self, other: &StateVector) -> Result<()> {
        if self.space != other.space {
            return Err(Error::structural("states live on different spaces"));
        }
        Ok(())
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        self.require_same_space(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Kronecker product `left ⊗ right`. Subsystem labels must be disjoint.
pub fn tensor_state(left: &StateVector, right: &StateVector) -> Result<StateVector> {
    let space = left.space.tensor(&right.space)?;
    let amps = left.amplitudes.kronecker(&right.amplitudes);
    let unit = left.unit && right.unit && (amps.norm_squared() - 1.0).abs() <= UNIT_NORM_TOL;
    Ok(StateVector::with_flag(space, amps, unit))
}

/// `⟨bra|ket⟩`, conjugate-linear in `bra`.
pub fn inner(bra: &StateVector, ket: &StateVector) -> Result<Complex64> {
    if bra.dimension() != ket.dimension() || bra.space != ket.space {
        return Err(Error::structural(format!(
            "inner product across different spaces (dimensions {} and {})",
            bra.dimension(),
            ket.dimension()
        )));
    }
    Ok(bra.amplitudes.dotc(&ket.amplitudes))
}
