//! Config files for every subcommand.
//!
//! All documents carry an optional `"schema_version": 1`, reject unknown
//! keys, and write complex numbers as `{"re": .., "im": ..}`.

use std::path::PathBuf;

use nonloc_core::nonlocal::SpinMeasurementAngles;
use nonloc_core::optics::{ModeCircuit, PhotonInput};
use nonloc_core::qcore::CompositeSpace;
use nonloc_core::scenarios::{HardyScenario, Searched, BUILTINS};
use nonloc_core::serde_complex::ReIm;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;
const NORM_TOL: f64 = 1e-10;

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Tsv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardyDetectors {
    #[serde(rename = "U1")]
    pub u1: bool,
    #[serde(rename = "U2")]
    pub u2: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineCircuit {
    pub circuit: ModeCircuit,
    #[serde(default)]
    pub input: PhotonInput,
    /// Modes carrying a click detector at the output.
    #[serde(default)]
    pub detectors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InlineScenario {
    Hardy(Box<HardyScenario>),
    Circuit(InlineCircuit),
}

/// Config of `nonloc run`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario_inline: Option<InlineScenario>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub searched: Option<Searched>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<ReIm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<ReIm>,
    /// Extra settings at which the isomorphism state is also evaluated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<SpinMeasurementAngles>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detectors: Option<HardyDetectors>,
    #[serde(default, skip_serializing)]
    pub format: Option<Format>,
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
}

/// A measurement outcome given by basis indices or by spanning vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeSpec {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indices: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vectors: Option<Vec<Vec<ReIm>>>,
}

/// Config of `nonloc abl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AblConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub space: CompositeSpace,
    pub pre: Vec<ReIm>,
    pub post: Vec<ReIm>,
    pub measurement: Vec<OutcomeSpec>,
    #[serde(default, skip_serializing)]
    pub format: Option<Format>,
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
}

/// Config of `nonloc chsh`: amplitudes over `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChshConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub state: Vec<ReIm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<SpinMeasurementAngles>,
    #[serde(default, skip_serializing)]
    pub format: Option<Format>,
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
}

/// Behavior file for `nonloc lhv-check`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BehaviorConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub settings: [usize; 2],
    pub outcomes: [usize; 2],
    pub table: Vec<f64>,
    #[serde(default, skip_serializing)]
    pub format: Option<Format>,
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
}

/// Common handling of version, output format and path.
pub trait Document: DeserializeOwned + Serialize {
    fn version(&self) -> u32;
    fn format(&self) -> Option<Format>;
    fn output(&self) -> Option<&PathBuf>;
    fn check(&self) -> Result<(), CliError> {
        Ok(())
    }
}

macro_rules! document {
    ($t:ty) => {
        impl Document for $t {
            fn version(&self) -> u32 {
                self.schema_version
            }
            fn format(&self) -> Option<Format> {
                self.format
            }
            fn output(&self) -> Option<&PathBuf> {
                self.output.as_ref()
            }
            fn check(&self) -> Result<(), CliError> {
                check(self)
            }
        }
    };
}

document!(RunConfig);
document!(AblConfig);
document!(ChshConfig);
document!(BehaviorConfig);

trait Check {
    fn check_fields(&self) -> Result<(), CliError> {
        Ok(())
    }
}

fn check<T: Check>(doc: &T) -> Result<(), CliError> {
    doc.check_fields()
}

fn schema(path: &str, msg: impl Into<String>) -> CliError {
    CliError::Config(format!("schema error at {path}: {}", msg.into()))
}

fn unit_pair(alpha: ReIm, beta: ReIm) -> Result<(), CliError> {
    let n = alpha.re * alpha.re + alpha.im * alpha.im + beta.re * beta.re + beta.im * beta.im;
    if (n - 1.0).abs() > NORM_TOL {
        return Err(schema("alpha", format!("|alpha|² + |beta|² = {n}, expected 1")));
    }
    Ok(())
}

impl Check for RunConfig {
    fn check_fields(&self) -> Result<(), CliError> {
        let name = match (&self.scenario, &self.scenario_inline) {
            (Some(_), Some(_)) => {
                return Err(schema("scenario", "give either `scenario` or `scenario_inline`, not both"))
            }
            (None, None) => return Err(schema("scenario", "one of `scenario` or `scenario_inline` is required")),
            (Some(name), None) => {
                if !BUILTINS.contains(&name.as_str()) {
                    return Err(schema("scenario", format!("unknown scenario '{name}', expected one of {BUILTINS:?}")));
                }
                name.as_str()
            }
            (None, Some(InlineScenario::Hardy(_))) => "hardy",
            (None, Some(InlineScenario::Circuit(_))) => "circuit",
        };
        if self.searched.is_some() && name != "three-box" {
            return Err(schema("searched", format!("only applies to three-box, not {name}")));
        }
        if (self.alpha.is_some() || self.beta.is_some() || self.angles.is_some()) && name != "isomorphism" {
            return Err(schema("alpha", format!("only applies to isomorphism, not {name}")));
        }
        if self.detectors.is_some() && !matches!(name, "hardy-default" | "hardy") {
            return Err(schema("detectors", format!("only applies to hardy scenarios, not {name}")));
        }
        match (self.alpha, self.beta) {
            (Some(a), Some(b)) => unit_pair(a, b)?,
            (None, None) => {}
            _ => return Err(schema("beta", "alpha and beta must be given together")),
        }
        Ok(())
    }
}

impl Check for AblConfig {
    fn check_fields(&self) -> Result<(), CliError> {
        for (i, o) in self.measurement.iter().enumerate() {
            if o.indices.is_some() == o.vectors.is_some() {
                return Err(schema(&format!("measurement[{i}]"), "give exactly one of `indices` or `vectors`"));
            }
        }
        Ok(())
    }
}

impl Check for ChshConfig {}
impl Check for BehaviorConfig {}

/// Parses a config document: JSON syntax errors report line and column,
/// schema errors report the field path.
pub fn parse<T: Document>(text: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: T = serde_path_to_error::deserialize(de).map_err(|e| {
        let inner = e.inner();
        if inner.is_syntax() || inner.is_eof() {
            CliError::Config(format!(
                "malformed JSON at line {}, column {}: {inner}",
                inner.line(),
                inner.column()
            ))
        } else {
            let path = e.path().to_string();
            let path = if path == "." { "<root>".to_string() } else { path };
            CliError::Config(format!("schema error at {path}: {inner}"))
        }
    })?;
    if doc.version() != SCHEMA_VERSION {
        return Err(schema("schema_version", format!("unsupported version {}, expected 1", doc.version())));
    }
    doc.check()?;
    Ok(doc)
}

/// SHA-256 of the canonical (re-serialized, defaults applied) document,
/// excluding output format and path.
pub fn config_hash<T: Document>(doc: &T) -> String {
    let canonical = serde_json::to_string(doc).expect("config serializes");
    format!("{:x}", Sha256::digest(canonical.as_bytes()))
}
