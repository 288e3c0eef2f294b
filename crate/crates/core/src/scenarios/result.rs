use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::nonlocal::{MembershipResult, SpinMeasurementAngles};
use crate::prepost::ConditionalDistribution;

/// One conditioning event of a table. `None` marks a condition of
/// probability at most `NULL_WEIGHT`, for which no distribution exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub condition: String,
    pub distribution: Option<ConditionalDistribution>,
}

impl TableRow {
    pub fn defined(condition: impl Into<String>, distribution: ConditionalDistribution) -> Self {
        TableRow { condition: condition.into(), distribution: Some(distribution) }
    }

    pub fn undefined(condition: impl Into<String>) -> Self {
        TableRow { condition: condition.into(), distribution: None }
    }

    pub fn is_undefined(&self) -> bool {
        self.distribution.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityTable {
    pub name: String,
    pub rows: Vec<TableRow>,
}

impl ProbabilityTable {
    pub fn new(name: impl Into<String>) -> Self {
        ProbabilityTable { name: name.into(), rows: Vec::new() }
    }

    pub fn row(&self, condition: &str) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.condition == condition)
    }
}

/// Output of a scenario run: named tables and scalars plus metadata.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub scenario: String,
    pub metadata: BTreeMap<String, String>,
    pub values: BTreeMap<String, f64>,
    #[serde(with = "crate::serde_complex::map")]
    pub amplitudes: BTreeMap<String, Complex64>,
    pub tables: Vec<ProbabilityTable>,
    pub angles: Option<SpinMeasurementAngles>,
    pub membership: Option<MembershipResult>,
    pub reconstruction: Option<String>,
}

impl ScenarioResult {
    pub fn new(scenario: impl Into<String>) -> Self {
        ScenarioResult { scenario: scenario.into(), ..Default::default() }
    }

    pub fn table(&self, name: &str) -> Option<&ProbabilityTable> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }
}
