use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::space::CompositeSpace;
use super::state::{inner, StateVector};
use crate::error::{Error, Result};

/// Global comparison tolerance for operator identities.
pub const OP_TOL: f64 = 1e-10;

/// Dense square operator on a [`CompositeSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    space: CompositeSpace,
    matrix: DMatrix<Complex64>,
}

impl LinearOperator {
    pub fn new(space: CompositeSpace, matrix: DMatrix<Complex64>) -> Result<Self> {
        let n = space.total_dimension();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::structural(format!(
                "operator is {}x{}, space dimension is {n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(LinearOperator { space, matrix })
    }

    /// Row-major entries.
    pub fn from_rows(space: CompositeSpace, entries: &[Complex64]) -> Result<Self> {
        let n = space.total_dimension();
        if entries.len() != n * n {
            return Err(Error::structural(format!(
                "expected {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        Self::new(space, DMatrix::from_row_slice(n, n, entries))
    }

    pub fn identity(space: &CompositeSpace) -> Self {
        let n = space.total_dimension();
        LinearOperator { space: space.clone(), matrix: DMatrix::identity(n, n) }
    }

    pub fn zero(space: &CompositeSpace) -> Self {
        let n = space.total_dimension();
        LinearOperator { space: space.clone(), matrix: DMatrix::zeros(n, n) }
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn order(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        LinearOperator { space: self.space.clone(), matrix: self.matrix.adjoint() }
    }

    fn require_same_space(&self, other: &LinearOperator) -> Result<()> {
        if self.space != other.space {
            return Err(Error::structural("operators live on different spaces"));
        }
        Ok(())
    }

    /// Operator product `self · other`.
    pub fn compose(&self, other: &LinearOperator) -> Result<Self> {
        self.require_same_space(other)?;
        Ok(LinearOperator { space: self.space.clone(), matrix: &self.matrix * &other.matrix })
    }

    pub fn add(&self, other: &LinearOperator) -> Result<Self> {
        self.require_same_space(other)?;
        Ok(LinearOperator { space: self.space.clone(), matrix: &self.matrix + &other.matrix })
    }

    pub fn sub(&self, other: &LinearOperator) -> Result<Self> {
        self.require_same_space(other)?;
        Ok(LinearOperator { space: self.space.clone(), matrix: &self.matrix - &other.matrix })
    }

    /// `1 − self`.
    pub fn complement(&self) -> Self {
        LinearOperator::identity(&self.space).sub(self).expect("same space")
    }

    pub fn max_abs_diff(&self, other: &LinearOperator) -> Result<f64> {
        self.require_same_space(other)?;
        Ok(max_abs(&(&self.matrix - &other.matrix)))
    }

    /// `‖P² − P‖_max ≤ tol` and `‖P − P†‖_max ≤ tol`.
    pub fn is_projector(&self, tol: f64) -> bool {
        let sq = &self.matrix * &self.matrix;
        max_abs(&(sq - &self.matrix)) <= tol && max_abs(&(&self.matrix - self.matrix.adjoint())) <= tol
    }

    /// `⟨bra|self|ket⟩`.
    pub fn matrix_element(&self, bra: &StateVector, ket: &StateVector) -> Result<Complex64> {
        let applied = apply(self, ket)?;
        inner(bra, &applied)
    }
}

pub(crate) fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `‖U†U − I‖_max ≤ tol`.
pub fn is_unitary(op: &LinearOperator, tol: f64) -> bool {
    let n = op.order();
    let gram = op.matrix.adjoint() * &op.matrix;
    max_abs(&(gram - DMatrix::<Complex64>::identity(n, n))) <= tol
}

/// Matrix–vector product. The result keeps the unit-norm flag only when the
/// input had it and the operator checks out as unitary.
pub fn apply(op: &LinearOperator, state: &StateVector) -> Result<StateVector> {
    if op.space != *state.space() {
        return Err(Error::structural(format!(
            "operator of order {} applied to state of dimension {}",
            op.order(),
            state.dimension()
        )));
    }
    let out: DVector<Complex64> = &op.matrix * state.vector();
    let unit = state.is_unit() && is_unitary(op, OP_TOL);
    Ok(StateVector::with_flag(state.space().clone(), out, unit))
}

fn check_targets(targets: &[usize], space: &CompositeSpace, local_order: usize) -> Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if t >= space.len() {
            return Err(Error::structural(format!(
                "target subsystem {t} out of range ({} subsystems)",
                space.len()
            )));
        }
        if targets[..i].contains(&t) {
            return Err(Error::structural(format!("target subsystem {t} repeated")));
        }
    }
    let expected: usize = targets.iter().map(|&t| space.dims()[t]).product();
    if expected != local_order {
        return Err(Error::structural(format!(
            "local operator order {local_order} does not match target dimension {expected}"
        )));
    }
    Ok(())
}

/// Index into a local operator from the digits of `index` on `targets`;
/// the first target is the most significant local digit.
fn local_index(space: &CompositeSpace, index: usize, targets: &[usize]) -> usize {
    targets.iter().fold(0, |acc, &t| acc * space.dims()[t] + space.digit(index, t))
}

/// Lift `local` (acting on `targets`, in that order) to the full space,
/// identity elsewhere.
pub fn embed(local: &DMatrix<Complex64>, targets: &[usize], space: &CompositeSpace) -> Result<LinearOperator> {
    if local.nrows() != local.ncols() {
        return Err(Error::structural("local operator must be square"));
    }
    check_targets(targets, space, local.nrows())?;
    let n = space.total_dimension();
    // Offset contributed by the target digits, so that two indices share all
    // non-target digits iff their `rest` components agree.
    let target_part =
        |idx: usize| targets.iter().map(|&t| space.digit(idx, t) * space.strides()[t]).sum::<usize>();
    let mut m = DMatrix::zeros(n, n);
    for row in 0..n {
        let rest_r = row - target_part(row);
        let lr = local_index(space, row, targets);
        for col in 0..n {
            if col - target_part(col) != rest_r {
                continue;
            }
            m[(row, col)] = local[(lr, local_index(space, col, targets))];
        }
    }
    Ok(LinearOperator { space: space.clone(), matrix: m })
}

/// Apply a local operator on `targets` directly to a state without forming
/// the full matrix. Cost is `O(dim · local_order)`.
pub fn apply_local(local: &DMatrix<Complex64>, targets: &[usize], state: &StateVector) -> Result<StateVector> {
    let space = state.space();
    if local.nrows() != local.ncols() {
        return Err(Error::structural("local operator must be square"));
    }
    let k = local.nrows();
    check_targets(targets, space, k)?;
    let offsets: Vec<usize> = (0..k)
        .map(|mut li| {
            let mut off = 0;
            for &t in targets.iter().rev() {
                let d = space.dims()[t];
                off += (li % d) * space.strides()[t];
                li /= d;
            }
            off
        })
        .collect();
    let amps = state.amplitudes();
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    let mut gathered = vec![Complex64::new(0.0, 0.0); k];
    for base in 0..amps.len() {
        if targets.iter().any(|&t| space.digit(base, t) != 0) {
            continue;
        }
        for (g, &off) in gathered.iter_mut().zip(&offsets) {
            *g = amps[base + off];
        }
        if gathered.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
            continue;
        }
        for (r, &off) in offsets.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, g) in gathered.iter().enumerate() {
                acc += local[(r, c)] * g;
            }
            out[base + off] = acc;
        }
    }
    let local_unitary = {
        let gram = local.adjoint() * local;
        max_abs(&(gram - DMatrix::<Complex64>::identity(k, k))) <= OP_TOL
    };
    Ok(StateVector::with_flag(
        space.clone(),
        DVector::from_vec(out),
        state.is_unit() && local_unitary,
    ))
}

/// `Σ |v⟩⟨v|` over pairwise-orthogonal unit vectors.
pub fn projector_onto(basis_states: &[StateVector]) -> Result<LinearOperator> {
    let first = basis_states
        .first()
        .ok_or_else(|| Error::validation("projector needs at least one vector"))?;
    let space = first.space().clone();
    for (i, v) in basis_states.iter().enumerate() {
        if *v.space() != space {
            return Err(Error::structural("projector vectors live on different spaces"));
        }
        if (v.norm_sqr() - 1.0).abs() > OP_TOL {
            return Err(Error::validation(format!("vector {i} is not unit norm")));
        }
        for (j, w) in basis_states[..i].iter().enumerate() {
            let ov = inner(w, v)?.norm();
            if ov > OP_TOL {
                return Err(Error::validation(format!(
                    "vectors {j} and {i} are not orthogonal (|overlap| = {ov:e})"
                )));
            }
        }
    }
    let n = space.total_dimension();
    let mut m = DMatrix::zeros(n, n);
    for v in basis_states {
        m += v.vector() * v.vector().adjoint();
    }
    Ok(LinearOperator { space, matrix: m })
}

/// Projector onto a set of computational basis indices.
pub fn basis_projector(space: &CompositeSpace, indices: &[usize]) -> Result<LinearOperator> {
    let n = space.total_dimension();
    let mut m = DMatrix::zeros(n, n);
    for &i in indices {
        if i >= n {
            return Err(Error::structural(format!("basis index {i} out of range for dimension {n}")));
        }
        m[(i, i)] = Complex64::new(1.0, 0.0);
    }
    Ok(LinearOperator { space: space.clone(), matrix: m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::space::Subsystem;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn two_qubits() -> CompositeSpace {
        CompositeSpace::new(vec![Subsystem::spin("a"), Subsystem::spin("b")]).unwrap()
    }

    fn boxes() -> CompositeSpace {
        CompositeSpace::new(vec![Subsystem::position("box", 3)]).unwrap()
    }

    fn flip() -> DMatrix<Complex64> {
        DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
    }

    fn psi1() -> StateVector {
        let s = 1.0 / 3f64.sqrt();
        StateVector::new(boxes(), vec![c(s), c(s), c(s)]).unwrap()
    }

    #[test]
    fn identity_and_zero_action() {
        let psi = psi1();
        let id = apply(&LinearOperator::identity(&boxes()), &psi).unwrap();
        assert_eq!(id, psi);
        assert!(id.is_unit());
        let z = apply(&LinearOperator::zero(&boxes()), &psi).unwrap();
        assert!(z.amplitudes().iter().all(|a| a.norm() == 0.0));
        assert!(!z.is_unit());
    }

    #[test]
    fn box_projector_action() {
        let pa = projector_onto(&[StateVector::basis(&boxes(), &[0]).unwrap()]).unwrap();
        let out = apply(&pa, &psi1()).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((out.amplitudes()[0] - c(s)).norm() < 1e-15);
        assert_eq!(out.amplitudes()[1], c(0.0));
        assert_eq!(out.amplitudes()[2], c(0.0));
        assert!(!out.is_unit());
        assert!(!is_unitary(&pa, 1e-10));
        assert!(pa.is_projector(1e-10));
    }

    #[test]
    fn projector_onto_bc_gives_unnormalized_branch() {
        let sp = boxes();
        let pbc = projector_onto(&[
            StateVector::basis(&sp, &[1]).unwrap(),
            StateVector::basis(&sp, &[2]).unwrap(),
        ])
        .unwrap();
        let out = apply(&pbc, &psi1()).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert_eq!(out.amplitudes()[0], c(0.0));
        assert!((out.amplitudes()[1] - c(s)).norm() < 1e-15);
        assert!((out.amplitudes()[2] - c(s)).norm() < 1e-15);
    }

    #[test]
    fn projector_onto_full_basis_is_identity() {
        let sp = boxes();
        let all: Vec<_> = (0..3).map(|i| StateVector::basis(&sp, &[i]).unwrap()).collect();
        let p = projector_onto(&all).unwrap();
        assert!(p.max_abs_diff(&LinearOperator::identity(&sp)).unwrap() < 1e-15);
    }

    #[test]
    fn projector_rejects_non_orthogonal() {
        let sp = boxes();
        let a = StateVector::basis(&sp, &[0]).unwrap();
        assert!(matches!(projector_onto(&[a.clone(), psi1()]), Err(Error::Validation(_))));
    }

    #[test]
    fn embed_identity_and_flip() {
        let sp = two_qubits();
        let id2 = DMatrix::<Complex64>::identity(2, 2);
        let e = embed(&id2, &[0], &sp).unwrap();
        assert!(e.max_abs_diff(&LinearOperator::identity(&sp)).unwrap() == 0.0);

        let x1 = embed(&flip(), &[1], &sp).unwrap();
        let out = apply(&x1, &StateVector::basis(&sp, &[0, 0]).unwrap()).unwrap();
        assert_eq!(out, StateVector::basis(&sp, &[0, 1]).unwrap());
    }

    #[test]
    fn embed_target_order_is_permutation_conjugate() {
        let sp = two_qubits();
        // An asymmetric two-qubit operator: CNOT with control on the first target.
        let mut cnot = DMatrix::<Complex64>::zeros(4, 4);
        for (r, cc) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            cnot[(r, cc)] = c(1.0);
        }
        let e01 = embed(&cnot, &[0, 1], &sp).unwrap();
        let e10 = embed(&cnot, &[1, 0], &sp).unwrap();
        let swap = {
            let mut m = DMatrix::<Complex64>::zeros(4, 4);
            for (r, cc) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
                m[(r, cc)] = c(1.0);
            }
            LinearOperator::new(sp.clone(), m).unwrap()
        };
        let conj = swap.compose(&e01).unwrap().compose(&swap).unwrap();
        assert!(conj.max_abs_diff(&e10).unwrap() < 1e-15);
    }

    #[test]
    fn embed_errors() {
        let sp = two_qubits();
        assert!(embed(&flip(), &[2], &sp).is_err());
        assert!(embed(&flip(), &[0, 1], &sp).is_err());
        let id4 = DMatrix::<Complex64>::identity(4, 4);
        assert!(embed(&id4, &[0, 0], &sp).is_err());
    }

    #[test]
    fn apply_local_matches_embed() {
        let sp = CompositeSpace::new(vec![
            Subsystem::spin("a"),
            Subsystem::position("box", 3),
            Subsystem::mode("m", 1),
        ])
        .unwrap();
        let n = sp.total_dimension();
        let amps: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64 * 0.1, 1.0 - i as f64 * 0.05)).collect();
        let psi = StateVector::new(sp.clone(), amps).unwrap();
        let local = DMatrix::from_fn(4, 4, |r, cc| Complex64::new((r * 4 + cc) as f64, (r as f64) - (cc as f64)));
        for targets in [[0usize, 2], [2, 0]] {
            let full = apply(&embed(&local, &targets, &sp).unwrap(), &psi).unwrap();
            let fast = apply_local(&local, &targets, &psi).unwrap();
            assert!(full.max_abs_diff(&fast).unwrap() < 1e-12);
        }
    }
}
