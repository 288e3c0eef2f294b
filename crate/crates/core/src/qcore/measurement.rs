use super::operator::{LinearOperator, OP_TOL};
use super::space::CompositeSpace;
use crate::error::{Error, Result};

/// Complete set of orthogonal projectors with outcome labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMeasurement {
    space: CompositeSpace,
    projectors: Vec<LinearOperator>,
    labels: Vec<String>,
}

impl ProjectiveMeasurement {
    /// Checks idempotence, self-adjointness and completeness, each within 1e-10.
    pub fn new(labels: Vec<String>, projectors: Vec<LinearOperator>) -> Result<Self> {
        let first = projectors
            .first()
            .ok_or_else(|| Error::validation("measurement needs at least one projector"))?;
        if labels.len() != projectors.len() {
            return Err(Error::structural(format!(
                "{} labels for {} projectors",
                labels.len(),
                projectors.len()
            )));
        }
        let space = first.space().clone();
        let mut sum = LinearOperator::zero(&space);
        for (label, p) in labels.iter().zip(&projectors) {
            if *p.space() != space {
                return Err(Error::structural("projectors live on different spaces"));
            }
            if !p.is_projector(OP_TOL) {
                return Err(Error::validation(format!("'{label}' is not an orthogonal projector")));
            }
            sum = sum.add(p)?;
        }
        let gap = sum.max_abs_diff(&LinearOperator::identity(&space))?;
        if gap > OP_TOL {
            return Err(Error::validation(format!(
                "projectors do not sum to identity (max deviation {gap:e})"
            )));
        }
        Ok(ProjectiveMeasurement { space, projectors, labels })
    }

    /// `{P, 1 − P}` with the given labels.
    pub fn binary(projector: LinearOperator, yes: impl Into<String>, no: impl Into<String>) -> Result<Self> {
        let complement = projector.complement();
        Self::new(vec![yes.into(), no.into()], vec![projector, complement])
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn projectors(&self) -> &[LinearOperator] {
        &self.projectors
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn outcome(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::operator::basis_projector;
    use crate::qcore::space::Subsystem;

    fn boxes() -> CompositeSpace {
        CompositeSpace::new(vec![Subsystem::position("box", 3)]).unwrap()
    }

    #[test]
    fn binary_measurement_is_complete() {
        let pa = basis_projector(&boxes(), &[0]).unwrap();
        let m = ProjectiveMeasurement::binary(pa, "found", "not found").unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.outcome("not found"), Some(1));
    }

    #[test]
    fn incomplete_set_is_rejected() {
        let sp = boxes();
        let pa = basis_projector(&sp, &[0]).unwrap();
        let pb = basis_projector(&sp, &[1]).unwrap();
        let err = ProjectiveMeasurement::new(vec!["A".into(), "B".into()], vec![pa, pb]).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn non_projector_is_rejected() {
        let sp = boxes();
        let twice = basis_projector(&sp, &[0]).unwrap().add(&basis_projector(&sp, &[0]).unwrap()).unwrap();
        let rest = basis_projector(&sp, &[1, 2]).unwrap();
        assert!(ProjectiveMeasurement::new(vec!["x".into(), "y".into()], vec![twice, rest]).is_err());
    }
}
