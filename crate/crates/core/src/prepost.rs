//! Pre- and post-selected ensembles and the conditional (ABL) probability rule
//!
//! For an intermediate projective measurement `{P_j}` between a pre-selected
//! state `|pre⟩` and a post-selected state `|post⟩`:
//!
//! ```text
//! p_j = |⟨post|P_j|pre⟩|² / Σ_k |⟨post|P_k|pre⟩|²
//! ```
//!
//! A search with projector `P` succeeds with certainty exactly when the
//! complementary branch amplitude `⟨post|(1−P)|pre⟩` vanishes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{apply, inner, LinearOperator, ProjectiveMeasurement, StateVector, OP_TOL};

/// Total branch weight below which conditioning is treated as conditioning on
/// a measure-zero event rather than roundoff.
pub const NULL_WEIGHT: f64 = 1e-20;

const SUM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PrePostEnsemble {
    pre: StateVector,
    post: StateVector,
}

impl PrePostEnsemble {
    pub fn new(pre: StateVector, post: StateVector) -> Result<Self> {
        pre.require_unit("pre-selected state")?;
        post.require_unit("post-selected state")?;
        pre.require_same_space(&post)?;
        Ok(PrePostEnsemble { pre, post })
    }

    pub fn pre(&self) -> &StateVector {
        &self.pre
    }

    pub fn post(&self) -> &StateVector {
        &self.post
    }

    /// `⟨post|pre⟩`.
    pub fn overlap(&self) -> Complex64 {
        inner(&self.post, &self.pre).expect("same space checked at construction")
    }

    /// Flag for pairs whose unconditioned post-selection has zero probability.
    pub fn is_orthogonal(&self) -> bool {
        self.overlap().norm_sqr() <= NULL_WEIGHT
    }

    /// `⟨post|P|pre⟩` for each projector of `measurement`.
    pub fn branch_amplitudes(&self, measurement: &ProjectiveMeasurement) -> Result<Vec<Complex64>> {
        if measurement.space() != self.pre.space() {
            return Err(Error::structural("measurement and ensemble live on different spaces"));
        }
        measurement
            .projectors()
            .iter()
            .map(|p| p.matrix_element(&self.post, &self.pre))
            .collect()
    }
}

/// Outcome-labelled probabilities summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalDistribution {
    labels: Vec<String>,
    probabilities: Vec<f64>,
}

impl ConditionalDistribution {
    pub fn new(labels: Vec<String>, probabilities: Vec<f64>) -> Result<Self> {
        if labels.len() != probabilities.len() {
            return Err(Error::structural(format!(
                "{} labels for {} probabilities",
                labels.len(),
                probabilities.len()
            )));
        }
        if labels.is_empty() {
            return Err(Error::validation("distribution needs at least one outcome"));
        }
        if let Some(p) = probabilities.iter().find(|p| !(-SUM_TOL..=1.0 + SUM_TOL).contains(*p)) {
            return Err(Error::validation(format!("probability {p} outside [0, 1]")));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::validation(format!("probabilities sum to {total}")));
        }
        Ok(ConditionalDistribution { labels, probabilities })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, label: &str) -> Option<f64> {
        self.labels.iter().position(|l| l == label).map(|i| self.probabilities[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.labels.iter().map(String::as_str).zip(self.probabilities.iter().copied())
    }
}

/// ABL conditional distribution of `measurement` between pre- and
/// post-selection.
pub fn abl_probabilities(
    ensemble: &PrePostEnsemble,
    measurement: &ProjectiveMeasurement,
) -> Result<ConditionalDistribution> {
    let weights: Vec<f64> =
        ensemble.branch_amplitudes(measurement)?.iter().map(|a| a.norm_sqr()).collect();
    let total: f64 = weights.iter().sum();
    if total <= NULL_WEIGHT {
        return Err(Error::PostSelectionImpossible { weight: total });
    }
    ConditionalDistribution::new(
        measurement.labels().to_vec(),
        weights.iter().map(|w| w / total).collect(),
    )
}

/// Born-rule distribution `⟨ψ|P_j|ψ⟩`.
pub fn born_probabilities(
    state: &StateVector,
    measurement: &ProjectiveMeasurement,
) -> Result<ConditionalDistribution> {
    state.require_unit("state")?;
    if measurement.space() != state.space() {
        return Err(Error::structural("measurement and state live on different spaces"));
    }
    let probs = measurement
        .projectors()
        .iter()
        .map(|p| Ok(p.matrix_element(state, state)?.re.max(0.0)))
        .collect::<Result<Vec<f64>>>()?;
    ConditionalDistribution::new(measurement.labels().to_vec(), probs)
}

/// Collapse `state` with `projector`: returns `P|ψ⟩/‖P|ψ⟩‖` and `‖P|ψ⟩‖²`.
pub fn postselect(state: &StateVector, projector: &LinearOperator) -> Result<(StateVector, f64)> {
    if !projector.is_projector(OP_TOL) {
        return Err(Error::validation("postselect needs an orthogonal projector"));
    }
    let branch = apply(projector, state)?;
    let weight = branch.norm_sqr();
    if weight <= NULL_WEIGHT {
        return Err(Error::NullBranch { norm_sqr: weight });
    }
    let prob = (weight / state.norm_sqr()).min(1.0);
    Ok((branch.normalized()?, prob))
}

/// Probability of a whole measurement chain: collapse through each chosen
/// outcome in turn, then pass `post_projector`.
///
/// Omitting a step models the corresponding detector being absent. A chain
/// that hits a null branch has probability zero.
pub fn sequence_probability(
    pre: &StateVector,
    steps: &[(&ProjectiveMeasurement, usize)],
    post_projector: &LinearOperator,
) -> Result<f64> {
    pre.require_unit("pre-selected state")?;
    let mut branch = pre.clone();
    for (i, (measurement, outcome)) in steps.iter().enumerate() {
        if measurement.space() != pre.space() {
            return Err(Error::structural(format!("step {i} acts on a different space")));
        }
        let p = measurement.projectors().get(*outcome).ok_or_else(|| {
            Error::structural(format!(
                "step {i}: outcome {outcome} out of range ({} outcomes)",
                measurement.len()
            ))
        })?;
        branch = apply(p, &branch)?;
        if branch.norm_sqr() <= NULL_WEIGHT {
            return Ok(0.0);
        }
    }
    Ok(apply(post_projector, &branch)?.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{basis_projector, projector_onto, CompositeSpace, Subsystem};

    fn boxes() -> CompositeSpace {
        CompositeSpace::new(vec![Subsystem::position("box", 3)]).unwrap()
    }

    fn state(a: f64, b: f64, c: f64) -> StateVector {
        let n = (a * a + b * b + c * c).sqrt();
        StateVector::new(
            boxes(),
            [a, b, c].iter().map(|x| Complex64::new(x / n, 0.0)).collect(),
        )
        .unwrap()
    }

    fn three_box() -> PrePostEnsemble {
        PrePostEnsemble::new(state(1.0, 1.0, 1.0), state(1.0, 1.0, -1.0)).unwrap()
    }

    fn search(box_index: usize) -> ProjectiveMeasurement {
        ProjectiveMeasurement::binary(basis_projector(&boxes(), &[box_index]).unwrap(), "found", "not found")
            .unwrap()
    }

    fn all_boxes() -> ProjectiveMeasurement {
        let sp = boxes();
        ProjectiveMeasurement::new(
            vec!["A".into(), "B".into(), "C".into()],
            (0..3).map(|i| basis_projector(&sp, &[i]).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn searching_a_or_b_succeeds_with_certainty() {
        for b in [0, 1] {
            let d = abl_probabilities(&three_box(), &search(b)).unwrap();
            assert!((d.probability("found").unwrap() - 1.0).abs() < 1e-12);
            assert!(d.probability("not found").unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn searching_c_and_full_search() {
        // ⟨Ψ2|P_C|Ψ1⟩ = −1/3, ⟨Ψ2|(1−P_C)|Ψ1⟩ = 2/3 → (1/9)/(5/9), (4/9)/(5/9)
        let d = abl_probabilities(&three_box(), &search(2)).unwrap();
        assert!((d.probabilities()[0] - 0.2).abs() < 1e-12);
        assert!((d.probabilities()[1] - 0.8).abs() < 1e-12);
        let d = abl_probabilities(&three_box(), &all_boxes()).unwrap();
        for p in d.probabilities() {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn orthogonal_post_selection_is_rejected() {
        let ens = PrePostEnsemble::new(state(1.0, 0.0, 0.0), state(0.0, 1.0, 0.0)).unwrap();
        assert!(ens.is_orthogonal());
        let err = abl_probabilities(&ens, &search(2)).unwrap_err();
        assert!(matches!(err, Error::PostSelectionImpossible { .. }));
    }

    #[test]
    fn born_examples() {
        let d = born_probabilities(&state(1.0, 1.0, 1.0), &all_boxes()).unwrap();
        assert!(d.probabilities().iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-12));
        let d = born_probabilities(&state(1.0, 0.0, 0.0), &search(0)).unwrap();
        assert_eq!(d.probabilities(), &[1.0, 0.0]);

        let sp = CompositeSpace::new(vec![Subsystem::position("site", 2)]).unwrap();
        let (al, be) = (Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
        let psi = StateVector::new(sp.clone(), vec![al, be]).unwrap();
        let m = ProjectiveMeasurement::new(
            vec!["A".into(), "B".into()],
            vec![basis_projector(&sp, &[0]).unwrap(), basis_projector(&sp, &[1]).unwrap()],
        )
        .unwrap();
        let d = born_probabilities(&psi, &m).unwrap();
        assert!((d.probabilities()[0] - 0.36).abs() < 1e-12);
        assert!((d.probabilities()[1] - 0.64).abs() < 1e-12);
    }

    #[test]
    fn postselect_not_found_in_a() {
        let not_a = basis_projector(&boxes(), &[0]).unwrap().complement();
        let (st, p) = postselect(&state(1.0, 1.0, 1.0), &not_a).unwrap();
        assert!((p - 2.0 / 3.0).abs() < 1e-12);
        assert!(st.max_abs_diff(&state(0.0, 1.0, 1.0)).unwrap() < 1e-12);
        assert!(inner(&state(1.0, 1.0, -1.0), &st).unwrap().norm() < 1e-12);

        let (st, p) = postselect(&state(1.0, 1.0, 1.0), &basis_projector(&boxes(), &[0]).unwrap()).unwrap();
        assert!((p - 1.0 / 3.0).abs() < 1e-12);
        assert!(st.max_abs_diff(&state(1.0, 0.0, 0.0)).unwrap() < 1e-12);
    }

    #[test]
    fn postselect_null_branch() {
        let err = postselect(&state(1.0, 0.0, 0.0), &basis_projector(&boxes(), &[1]).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NullBranch { .. }));
    }

    #[test]
    fn sequence_examples() {
        let pre = state(1.0, 1.0, 1.0);
        let id = LinearOperator::identity(&boxes());
        assert!((sequence_probability(&pre, &[], &id).unwrap() - 1.0).abs() < 1e-15);

        let post = projector_onto(&[state(1.0, 1.0, -1.0)]).unwrap();
        let m = search(0);
        let p = sequence_probability(&pre, &[(&m, 0)], &post).unwrap();
        assert!((p - 1.0 / 9.0).abs() < 1e-12);
        let p = sequence_probability(&pre, &[(&m, 1)], &post).unwrap();
        assert!(p.abs() < 1e-12);
    }

    #[test]
    fn global_phase_invariance() {
        let ph = Complex64::from_polar(1.0, 0.7);
        let ens = three_box();
        let rotated = PrePostEnsemble::new(ens.pre().scaled(ph), ens.post().scaled(ph.conj() * ph * ph)).unwrap();
        let a = abl_probabilities(&ens, &search(2)).unwrap();
        let b = abl_probabilities(&rotated, &search(2)).unwrap();
        for (x, y) in a.probabilities().iter().zip(b.probabilities()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn distribution_validation() {
        assert!(ConditionalDistribution::new(vec!["a".into()], vec![0.5]).is_err());
        assert!(ConditionalDistribution::new(vec!["a".into(), "b".into()], vec![1.2, -0.2]).is_err());
        assert!(ConditionalDistribution::new(vec!["a".into()], vec![1.0, 0.0]).is_err());
    }
}
