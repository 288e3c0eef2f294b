//! Two-site interferometer with optional intermediate detectors `U1`, `U2`
//! and final outcomes `F1`, `F2`.
//!
//! The circuit is split at `detection_stage`: elements before it prepare the
//! shared state (and may couple the two sites), elements after it act within
//! one site. A present `U_i` is a non-demolition click measurement of mode
//! `u_i` at the split; the photons then continue through the rest of the
//! circuit. `F_i = 1` when the click pattern on the site's final modes equals
//! the recorded pattern.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use super::result::{ProbabilityTable, ScenarioResult, TableRow};
use crate::error::{Error, Result};
use crate::optics::{input_state, off_sector_weight, project_clicks, propagate, Element, ModeCircuit, PhotonInput};
use crate::prepost::{ConditionalDistribution, NULL_WEIGHT};
use crate::qcore::StateVector;

const CERTAINTY_TOL: f64 = 1e-9;

/// `F_i = 1` iff the clicks on `modes` read `pattern` (`'1'` = click).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteOutcome {
    pub modes: Vec<String>,
    pub pattern: String,
}

impl SiteOutcome {
    fn clicks(&self) -> Result<Vec<(String, bool)>> {
        if self.pattern.len() != self.modes.len() || !self.pattern.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::validation(format!(
                "F pattern '{}' must be one 0/1 digit per mode {:?}",
                self.pattern, self.modes
            )));
        }
        Ok(self.modes.iter().cloned().zip(self.pattern.chars().map(|c| c == '1')).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardyScenario {
    pub circuit: ModeCircuit,
    pub input: PhotonInput,
    /// Modes belonging to site 1 and site 2.
    pub sites: [Vec<String>; 2],
    /// Number of elements applied before the `U` detectors.
    pub detection_stage: usize,
    pub u_modes: [String; 2],
    #[serde(default)]
    pub u1_present: bool,
    #[serde(default)]
    pub u2_present: bool,
    pub f_outcomes: [SiteOutcome; 2],
    pub reconstruction: String,
}

/// A detector configuration `(U1, U2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Configuration {
    pub u1: bool,
    pub u2: bool,
}

impl Configuration {
    pub const ALL: [Configuration; 4] = [
        Configuration { u1: false, u2: false },
        Configuration { u1: true, u2: false },
        Configuration { u1: false, u2: true },
        Configuration { u1: true, u2: true },
    ];

    pub fn label(&self) -> String {
        let word = |p: bool| if p { "present" } else { "absent" };
        format!("U1={},U2={}", word(self.u1), word(self.u2))
    }

    fn present(&self) -> Vec<usize> {
        [self.u1, self.u2].iter().enumerate().filter(|(_, p)| **p).map(|(i, _)| i).collect()
    }
}

impl HardyScenario {
    pub fn configuration(&self) -> Configuration {
        Configuration { u1: self.u1_present, u2: self.u2_present }
    }

    fn site_of(&self, mode: &str) -> Option<usize> {
        self.sites.iter().position(|s| s.iter().any(|m| m == mode))
    }

    /// Structural checks: the sites partition the modes, every element after
    /// the detection stage stays within one site, and the detector and
    /// outcome modes sit at their own site.
    pub fn validate(&self) -> Result<()> {
        let all: BTreeSet<&str> = self.circuit.modes().iter().map(String::as_str).collect();
        let mut seen = BTreeSet::new();
        for m in self.sites.iter().flatten() {
            if !all.contains(m.as_str()) {
                return Err(Error::validation(format!("site mode '{m}' is not a circuit mode")));
            }
            if !seen.insert(m.as_str()) {
                return Err(Error::validation(format!("mode '{m}' is assigned to both sites")));
            }
        }
        if seen != all {
            let missing: Vec<&&str> = all.difference(&seen).collect();
            return Err(Error::validation(format!("modes {missing:?} belong to no site")));
        }
        if self.detection_stage > self.circuit.elements().len() {
            return Err(Error::validation("detection stage lies beyond the last element"));
        }
        for (k, el) in self.circuit.elements().iter().enumerate().skip(self.detection_stage) {
            let sites: BTreeSet<Option<usize>> = el.modes().into_iter().map(|m| self.site_of(m)).collect();
            if sites.len() != 1 {
                return Err(Error::validation(format!("element {k} after the detection stage spans both sites")));
            }
        }
        for i in 0..2 {
            if self.site_of(&self.u_modes[i]) != Some(i) {
                return Err(Error::validation(format!("U{} mode must belong to site {}", i + 1, i + 1)));
            }
            self.f_outcomes[i].clicks()?;
            if self.f_outcomes[i].modes.iter().any(|m| self.site_of(m) != Some(i)) {
                return Err(Error::validation(format!("F{} modes must belong to site {}", i + 1, i + 1)));
            }
        }
        Ok(())
    }

    /// Final states for each `U` click pattern of a configuration, as
    /// `(clicks of present U detectors, unnormalized output)`.
    pub fn branches(&self, config: Configuration) -> Result<Vec<(Vec<bool>, StateVector)>> {
        self.validate()?;
        let n = self.circuit.elements().len();
        let before = self.circuit.slice(0..self.detection_stage)?;
        let after = self.circuit.slice(self.detection_stage..n)?;
        let mid = propagate(&before, &input_state(&self.circuit, &self.input)?)?;
        let present = config.present();
        let mut out = Vec::new();
        for key in (0..1usize << present.len()).rev() {
            let clicks: Vec<bool> = (0..present.len()).map(|b| key >> (present.len() - 1 - b) & 1 == 1).collect();
            let pattern: Vec<(String, bool)> =
                present.iter().zip(&clicks).map(|(&i, &c)| (self.u_modes[i].clone(), c)).collect();
            let branch = project_clicks(&mid, &pattern)?;
            out.push((clicks, propagate(&after, &branch)?));
        }
        Ok(out)
    }

    fn f_both(&self) -> Result<Vec<(String, bool)>> {
        Ok(self.f_outcomes[0].clicks()?.into_iter().chain(self.f_outcomes[1].clicks()?).collect())
    }

    /// Output state with no `U` detectors.
    pub fn output(&self) -> Result<StateVector> {
        let mut b = self.branches(Configuration { u1: false, u2: false })?;
        Ok(b.pop().expect("one branch").1)
    }

    /// Distribution of one site's click pattern (its `U` if present, then its
    /// outcome modes) with nothing conditioned on.
    pub fn site_marginal(&self, site: usize, config: Configuration) -> Result<ConditionalDistribution> {
        if site > 1 {
            return Err(Error::validation("site must be 0 or 1"));
        }
        let present = config.present();
        let u_slot = present.iter().position(|&i| i == site);
        let modes = &self.f_outcomes[site].modes;
        let own_u = usize::from(u_slot.is_some());
        let width = own_u + modes.len();
        let mut weights = vec![0.0; 1 << width];
        for (clicks, state) in self.branches(config)? {
            let space = state.space();
            let idx: Vec<usize> = modes.iter().map(|m| space.require_index(m)).collect::<Result<_>>()?;
            let prefix = u_slot.map(|s| usize::from(clicks[s])).unwrap_or(0);
            for (i, a) in state.amplitudes().iter().enumerate() {
                let w = a.norm_sqr();
                if w == 0.0 {
                    continue;
                }
                let key = idx.iter().fold(prefix, |acc, &k| (acc << 1) | usize::from(space.digit(i, k) > 0));
                weights[key] += w;
            }
        }
        let total: f64 = weights.iter().sum();
        let labels = (0..1usize << width)
            .map(|k| (0..width).map(|b| if k >> (width - 1 - b) & 1 == 1 { '1' } else { '0' }).collect())
            .collect();
        ConditionalDistribution::new(labels, weights.iter().map(|w| w / total).collect())
    }
}

/// `P(U clicks | F1 = F2 = 1)` for one configuration, plus `P(F1 = F2 = 1)`.
fn conditional_row(scenario: &HardyScenario, config: Configuration) -> Result<(f64, Option<ConditionalDistribution>)> {
    let f = scenario.f_both()?;
    let present = config.present();
    let mut joint = Vec::new();
    for (clicks, state) in scenario.branches(config)? {
        let label = if present.is_empty() {
            crate::optics::NO_MEASUREMENT.to_string()
        } else {
            present
                .iter()
                .zip(&clicks)
                .map(|(&i, &c)| format!("{}={}", scenario.u_modes[i], u8::from(c)))
                .collect::<Vec<_>>()
                .join(",")
        };
        joint.push((label, project_clicks(&state, &f)?.norm_sqr()));
    }
    let p_f: f64 = joint.iter().map(|(_, w)| w).sum();
    if p_f <= NULL_WEIGHT {
        return Ok((p_f, None));
    }
    let (labels, probs): (Vec<String>, Vec<f64>) = joint.into_iter().map(|(l, w)| (l, w / p_f)).unzip();
    Ok((p_f, Some(ConditionalDistribution::new(labels, probs)?)))
}

fn marginal_click(dist: &ConditionalDistribution, slot: usize) -> f64 {
    dist.iter()
        .filter(|(label, _)| label.split(',').nth(slot).is_some_and(|s| s.ends_with("=1")))
        .map(|(_, p)| p)
        .sum()
}

/// Four-row table over `(U1, U2)` of `P(U clicks | F1 = F2 = 1)`.
pub fn hardy_conditionals(scenario: &HardyScenario) -> Result<ScenarioResult> {
    scenario.validate()?;
    let mut result = ScenarioResult::new("hardy");
    result.reconstruction = Some(scenario.reconstruction.clone());
    result.metadata.insert("condition".into(), "F1=1,F2=1".into());
    for (i, f) in scenario.f_outcomes.iter().enumerate() {
        result.metadata.insert(format!("F{}", i + 1), format!("{}={}", f.modes.join(","), f.pattern));
    }
    result.metadata.insert("configured_plan".into(), scenario.configuration().label());

    let mut table = ProbabilityTable::new("u_given_f1f2");
    for config in Configuration::ALL {
        let label = config.label();
        let (p_f, dist) = conditional_row(scenario, config)?;
        result.values.insert(format!("p_f1f2[{label}]"), p_f);
        match dist {
            None => table.rows.push(TableRow::undefined(label)),
            Some(d) => {
                let present = config.present();
                for (slot, &i) in present.iter().enumerate() {
                    result.values.insert(format!("p_u{}_given_f1f2[{label}]", i + 1), marginal_click(&d, slot));
                }
                if present.len() == 2 {
                    let both = format!("{}=1,{}=1", scenario.u_modes[0], scenario.u_modes[1]);
                    result.values.insert(format!("p_u1_and_u2_given_f1f2[{label}]"), d.probability(&both).unwrap_or(0.0));
                }
                table.rows.push(TableRow::defined(label, d));
            }
        }
    }
    result.tables.push(table);

    let plan = scenario.configuration();
    let mut clicks = ProbabilityTable::new("site_clicks");
    for site in 0..2 {
        let mut modes: Vec<String> = Vec::new();
        if [plan.u1, plan.u2][site] {
            modes.push(scenario.u_modes[site].clone());
        }
        modes.extend(scenario.f_outcomes[site].modes.iter().cloned());
        let dist = scenario.site_marginal(site, plan)?;
        clicks.rows.push(TableRow::defined(format!("site {}: {} [{}]", site + 1, modes.join(","), plan.label()), dist));
    }
    result.tables.push(clicks);
    Ok(result)
}

/// Tag recorded with every result of [`hardy_default`].
pub const HARDY_DEFAULT_TAG: &str = "hardy-default/v1: reconstructed parameters. \
Inputs: one photon in s, one photon in a1, a2 empty; at most 2 photons per mode. \
Preparation: BS(s,u2; θ=π/4, φ=0) then BS(s,u1; π/2, 0) split the s photon between the sites; \
BS(a1,a2; π/4, 0) shares the a1 photon between the sites. \
Site mixers: BS(u1,a1; θ=atan√5, φ=π+atan2), BS(u2,a2; θ=atan√5, φ=2π−atan2). \
U1, U2: click detection on u1, u2 after the site mixers (element 5). \
Readout per site: BS(u_i,f_i; π/2, 0), BS(a_i,g_i; π/2, 0), BS(f_i,g_i; π/4, π/2). \
F_i=1: f_i clicks and g_i does not.";

/// The built-in reconstruction, checked against both conditional
/// certainties before it is returned.
pub fn hardy_default() -> Result<HardyScenario> {
    let mixer = 5f64.sqrt().atan();
    let skew = 2f64.atan();
    let bs = Element::beam_splitter;
    let elements = vec![
        bs("s", "u2", FRAC_PI_4, 0.0),
        bs("s", "u1", FRAC_PI_2, 0.0),
        bs("a1", "a2", FRAC_PI_4, 0.0),
        bs("u1", "a1", mixer, PI + skew),
        bs("u2", "a2", mixer, 2.0 * PI - skew),
        bs("u1", "f1", FRAC_PI_2, 0.0),
        bs("a1", "g1", FRAC_PI_2, 0.0),
        bs("f1", "g1", FRAC_PI_4, FRAC_PI_2),
        bs("u2", "f2", FRAC_PI_2, 0.0),
        bs("a2", "g2", FRAC_PI_2, 0.0),
        bs("f2", "g2", FRAC_PI_4, FRAC_PI_2),
    ];
    let modes: Vec<String> =
        ["s", "a1", "a2", "u1", "u2", "f1", "f2", "g1", "g2"].iter().map(|m| m.to_string()).collect();
    let circuit = ModeCircuit::new(modes, elements, 2)?;
    let names = |ms: &[&str]| ms.iter().map(|m| m.to_string()).collect::<Vec<_>>();
    let scenario = HardyScenario {
        circuit,
        input: PhotonInput::new([("s", 1), ("a1", 1)]),
        sites: [names(&["s", "a1", "u1", "f1", "g1"]), names(&["a2", "u2", "f2", "g2"])],
        detection_stage: 5,
        u_modes: ["u1".into(), "u2".into()],
        u1_present: false,
        u2_present: false,
        f_outcomes: [
            SiteOutcome { modes: names(&["f1", "g1"]), pattern: "10".into() },
            SiteOutcome { modes: names(&["f2", "g2"]), pattern: "10".into() },
        ],
        reconstruction: HARDY_DEFAULT_TAG.into(),
    };
    self_check(&scenario)?;
    Ok(scenario)
}

fn self_check(scenario: &HardyScenario) -> Result<()> {
    let invalid = |msg: String| Err(Error::ReconstructionInvalid(msg));
    let photons = scenario.input.total();
    let leak = off_sector_weight(&scenario.output()?, photons)?;
    if leak > 1e-12 {
        return invalid(format!("output has weight {leak:e} outside the {photons}-photon sector"));
    }
    for (config, site) in [(Configuration { u1: true, u2: false }, 0), (Configuration { u1: false, u2: true }, 1)] {
        let (p_f, dist) = conditional_row(scenario, config)?;
        let Some(d) = dist else {
            return invalid(format!("P(F1=F2=1) = {p_f:e} under {}", config.label()));
        };
        let p = marginal_click(&d, 0);
        if (p - 1.0).abs() > CERTAINTY_TOL {
            return invalid(format!("P(u{} | F1=F2=1) = {p} under {}, expected 1", site + 1, config.label()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_passes_and_reports_both_certainties() {
        let s = hardy_default().unwrap();
        let r = hardy_conditionals(&s).unwrap();
        let one = r.value("p_u1_given_f1f2[U1=present,U2=absent]").unwrap();
        let two = r.value("p_u2_given_f1f2[U1=absent,U2=present]").unwrap();
        assert!((one - 1.0).abs() < 1e-9 && (two - 1.0).abs() < 1e-9);
        let joint = r.value("p_u1_and_u2_given_f1f2[U1=present,U2=present]").unwrap();
        assert!(joint < 1.0 - 1e-3, "{joint}");
        assert!((r.value("p_f1f2[U1=absent,U2=absent]").unwrap() - 0.125).abs() < 1e-12);
        assert_eq!(r.table("u_given_f1f2").unwrap().rows.len(), 4);
        assert_eq!(r.reconstruction.as_deref(), Some(HARDY_DEFAULT_TAG));
    }

    #[test]
    fn cross_site_readout_is_rejected() {
        let mut s = hardy_default().unwrap();
        s.detection_stage = 2;
        assert!(matches!(s.validate(), Err(Error::Validation(_))));
    }

    #[test]
    fn broken_mixer_fails_the_self_check() {
        let mut s = hardy_default().unwrap();
        let mut elements = s.circuit.elements().to_vec();
        elements[3] = Element::beam_splitter("u1", "a1", FRAC_PI_4, 0.0);
        s.circuit = ModeCircuit::new(s.circuit.modes().to_vec(), elements, 2).unwrap();
        assert!(matches!(self_check(&s), Err(Error::ReconstructionInvalid(_))));
    }

    #[test]
    fn undefined_rows_when_f_is_impossible() {
        let mut s = hardy_default().unwrap();
        s.f_outcomes[0].pattern = "11".into();
        s.f_outcomes[1].pattern = "11".into();
        let r = hardy_conditionals(&s).unwrap();
        assert!(r.table("u_given_f1f2").unwrap().rows.iter().all(|row| row.is_undefined()));
    }
}
