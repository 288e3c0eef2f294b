use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::result::{ProbabilityTable, ScenarioResult, TableRow};
use crate::error::{Error, Result};
use crate::prepost::{abl_probabilities, born_probabilities, PrePostEnsemble};
use crate::qcore::{basis_projector, inner, CompositeSpace, ProjectiveMeasurement, StateVector, Subsystem};

pub const FOUND: &str = "found";
pub const NOT_FOUND: &str = "not found";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Searched {
    A,
    B,
    C,
    #[serde(rename = "none")]
    None,
}

impl Searched {
    fn index(self) -> Option<usize> {
        match self {
            Searched::A => Some(0),
            Searched::B => Some(1),
            Searched::C => Some(2),
            Searched::None => None,
        }
    }
}

impl fmt::Display for Searched {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Searched::A => "A",
            Searched::B => "B",
            Searched::C => "C",
            Searched::None => "none",
        })
    }
}

impl FromStr for Searched {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Searched::A),
            "B" | "b" => Ok(Searched::B),
            "C" | "c" => Ok(Searched::C),
            "none" => Ok(Searched::None),
            _ => Err(Error::validation(format!("unknown box '{s}', expected A, B, C or none"))),
        }
    }
}

const BOXES: [&str; 3] = ["A", "B", "C"];

/// A particle in three boxes, prepared in `(|A⟩+|B⟩+|C⟩)/√3` and later
/// found in `(|A⟩+|B⟩−|C⟩)/√3`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeBoxScenario {
    pub ensemble: PrePostEnsemble,
    pub searched: Searched,
}

pub fn box_space() -> CompositeSpace {
    CompositeSpace::new(vec![Subsystem::position("box", 3)]).expect("fixed layout")
}

impl ThreeBoxScenario {
    pub fn new(searched: Searched) -> Self {
        let space = box_space();
        let h = Complex64::new(1.0 / 3f64.sqrt(), 0.0);
        let pre = StateVector::new(space.clone(), vec![h, h, h]).expect("unit by construction");
        let post = StateVector::new(space, vec![h, h, -h]).expect("unit by construction");
        ThreeBoxScenario { ensemble: PrePostEnsemble::new(pre, post).expect("same space"), searched }
    }

    /// `{P_X, 1 − P_X}` for the searched box `X`.
    pub fn search_measurement(&self) -> Result<Option<ProjectiveMeasurement>> {
        let Some(k) = self.searched.index() else {
            return Ok(None);
        };
        let p = basis_projector(&box_space(), &[k])?;
        Ok(Some(ProjectiveMeasurement::binary(p, FOUND, NOT_FOUND)?))
    }

    pub fn position_measurement() -> Result<ProjectiveMeasurement> {
        let space = box_space();
        let projectors = (0..3).map(|k| basis_projector(&space, &[k])).collect::<Result<Vec<_>>>()?;
        ProjectiveMeasurement::new(BOXES.iter().map(|b| b.to_string()).collect(), projectors)
    }
}

/// ABL table for opening the searched box, with the branch amplitudes
/// `⟨post|P|pre⟩` that decide it. `none` gives the Born table of the
/// preparation over the three boxes.
pub fn three_box(searched: Searched) -> Result<ScenarioResult> {
    let scenario = ThreeBoxScenario::new(searched);
    let ens = &scenario.ensemble;
    let mut result = ScenarioResult::new("three-box");
    result.metadata.insert("searched".into(), searched.to_string());
    result.metadata.insert("pre".into(), "(|A⟩+|B⟩+|C⟩)/√3".into());
    result.metadata.insert("post".into(), "(|A⟩+|B⟩−|C⟩)/√3".into());
    result.amplitudes.insert("overlap".into(), inner(ens.post(), ens.pre())?);

    match scenario.search_measurement()? {
        Some(measurement) => {
            let abl = abl_probabilities(ens, &measurement)?;
            let branches = ens.branch_amplitudes(&measurement)?;
            for (label, amp) in measurement.labels().iter().zip(&branches) {
                result.amplitudes.insert(format!("branch[{label}]"), *amp);
            }
            let vanishing: Vec<&str> = measurement
                .labels()
                .iter()
                .zip(&branches)
                .filter(|(_, a)| a.norm() < 1e-12)
                .map(|(l, _)| l.as_str())
                .collect();
            result.metadata.insert(
                "vanishing_branch".into(),
                if vanishing.is_empty() { "none".into() } else { vanishing.join(",") },
            );
            result.values.insert("probability_found".into(), abl.probability(FOUND).unwrap_or(0.0));
            let mut table = ProbabilityTable::new("abl");
            table.rows.push(TableRow::defined(format!("pre,post; search {searched}"), abl));
            result.tables.push(table);
        }
        None => {
            let position = ThreeBoxScenario::position_measurement()?;
            let born = born_probabilities(ens.pre(), &position)?;
            let branches = ens.branch_amplitudes(&position)?;
            for (label, amp) in position.labels().iter().zip(&branches) {
                result.amplitudes.insert(format!("branch[{label}]"), *amp);
            }
            let mut table = ProbabilityTable::new("born");
            table.rows.push(TableRow::defined("pre", born));
            result.tables.push(table);
            let abl = abl_probabilities(ens, &position)?;
            let mut table = ProbabilityTable::new("abl");
            table.rows.push(TableRow::defined("pre,post; open every box", abl));
            result.tables.push(table);
        }
    }
    Ok(result)
}
