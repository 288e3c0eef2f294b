//! Linear-optical circuits over labelled modes with bounded photon number.
//!
//! Beam-splitter convention (creation operators):
//!
//! ```text
//! a†_i → cosθ·a†_i + i·e^{iφ}·sinθ·a†_j
//! a†_j → i·e^{−iφ}·sinθ·a†_i + cosθ·a†_j
//! ```
//!
//! Each mode is truncated at `max_total_photons`. Two-mode sectors whose total
//! exceeds the capacity are incomplete after truncation; the element acts as
//! the identity there. Those sectors are unreachable from inputs within the
//! photon budget, and the full truncated matrix stays exactly unitary.
//!
//! Detectors are non-number-resolving: a click means occupancy ≥ 1.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prepost::{ConditionalDistribution, NULL_WEIGHT};
use crate::qcore::{apply_local, CompositeSpace, LinearOperator, StateVector, Subsystem, SubsystemKind};

pub const DEFAULT_MAX_PHOTONS: usize = 3;

/// Outcome label used when no detector is present.
pub const NO_MEASUREMENT: &str = "no measurement";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Element {
    BeamSplitter { modes: [String; 2], theta: f64, phi: f64 },
    PhaseShift { mode: String, phi: f64 },
}

impl Element {
    pub fn beam_splitter(i: &str, j: &str, theta: f64, phi: f64) -> Self {
        Element::BeamSplitter { modes: [i.to_string(), j.to_string()], theta, phi }
    }

    pub fn phase_shift(mode: &str, phi: f64) -> Self {
        Element::PhaseShift { mode: mode.to_string(), phi }
    }

    pub fn modes(&self) -> Vec<&str> {
        match self {
            Element::BeamSplitter { modes, .. } => vec![&modes[0], &modes[1]],
            Element::PhaseShift { mode, .. } => vec![mode],
        }
    }

    fn validate(&self) -> Result<()> {
        let in_phase_range = |phi: f64| (0.0..2.0 * PI).contains(&phi);
        match self {
            Element::BeamSplitter { modes, theta, phi } => {
                if modes[0] == modes[1] {
                    return Err(Error::validation(format!("beam splitter on a single mode '{}'", modes[0])));
                }
                if !(0.0..=FRAC_PI_2).contains(theta) {
                    return Err(Error::validation(format!("beam splitter theta {theta} outside [0, π/2]")));
                }
                if !in_phase_range(*phi) {
                    return Err(Error::validation(format!("beam splitter phi {phi} outside [0, 2π)")));
                }
            }
            Element::PhaseShift { phi, .. } => {
                if !in_phase_range(*phi) {
                    return Err(Error::validation(format!("phase shift phi {phi} outside [0, 2π)")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCircuit {
    modes: Vec<String>,
    #[serde(default)]
    elements: Vec<Element>,
    #[serde(default = "default_max_photons")]
    max_total_photons: usize,
}

fn default_max_photons() -> usize {
    DEFAULT_MAX_PHOTONS
}

/// Ordered linear-optical elements over labelled modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCircuit", into = "RawCircuit")]
pub struct ModeCircuit {
    modes: Vec<String>,
    elements: Vec<Element>,
    max_total_photons: usize,
}

impl TryFrom<RawCircuit> for ModeCircuit {
    type Error = Error;

    fn try_from(raw: RawCircuit) -> Result<Self> {
        ModeCircuit::new(raw.modes, raw.elements, raw.max_total_photons)
    }
}

impl From<ModeCircuit> for RawCircuit {
    fn from(c: ModeCircuit) -> Self {
        RawCircuit { modes: c.modes, elements: c.elements, max_total_photons: c.max_total_photons }
    }
}

impl ModeCircuit {
    pub fn new(modes: Vec<String>, elements: Vec<Element>, max_total_photons: usize) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::validation("circuit needs at least one mode"));
        }
        if max_total_photons == 0 {
            return Err(Error::validation("max_total_photons must be positive"));
        }
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].contains(m) {
                return Err(Error::structural(format!("duplicate mode '{m}'")));
            }
        }
        for (k, el) in elements.iter().enumerate() {
            el.validate().map_err(|e| Error::validation(format!("element {k}: {e}")))?;
            if let Some(m) = el.modes().into_iter().find(|m| !modes.iter().any(|x| x == m)) {
                return Err(Error::structural(format!("element {k} references undeclared mode '{m}'")));
            }
        }
        Ok(ModeCircuit { modes, elements, max_total_photons })
    }

    pub fn modes(&self) -> &[String] {
        &self.modes
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn max_total_photons(&self) -> usize {
        self.max_total_photons
    }

    /// Same modes and budget, elements restricted to `range`.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Result<ModeCircuit> {
        let els = self
            .elements
            .get(range.clone())
            .ok_or_else(|| Error::structural(format!("element range {range:?} out of bounds")))?;
        ModeCircuit::new(self.modes.clone(), els.to_vec(), self.max_total_photons)
    }
}

/// Input Fock occupancies; unlisted modes are empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhotonInput {
    pub occupancy: BTreeMap<String, usize>,
}

impl PhotonInput {
    pub fn new<'a>(entries: impl IntoIterator<Item = (&'a str, usize)>) -> Self {
        PhotonInput { occupancy: entries.into_iter().map(|(m, n)| (m.to_string(), n)).collect() }
    }

    pub fn total(&self) -> usize {
        self.occupancy.values().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Detector {
    Present,
    Absent,
}

/// Detector placement per mode. Unlisted modes have no detector.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DetectorPlan {
    pub detectors: BTreeMap<String, Detector>,
}

impl DetectorPlan {
    pub fn present<'a>(modes: impl IntoIterator<Item = &'a str>) -> Self {
        DetectorPlan {
            detectors: modes.into_iter().map(|m| (m.to_string(), Detector::Present)).collect(),
        }
    }

    pub fn set(&mut self, mode: &str, setting: Detector) {
        self.detectors.insert(mode.to_string(), setting);
    }

    pub fn is_present(&self, mode: &str) -> bool {
        self.detectors.get(mode) == Some(&Detector::Present)
    }

    /// Subsystem indices of present detectors, in space order.
    fn present_indices(&self, space: &CompositeSpace) -> Result<Vec<usize>> {
        for mode in self.detectors.keys() {
            space.require_index(mode)?;
        }
        Ok((0..space.len()).filter(|&k| self.is_present(&space.subsystems()[k].label)).collect())
    }
}

/// One optical-mode subsystem per circuit mode, each holding up to
/// `max_total_photons`.
pub fn build_space(circuit: &ModeCircuit) -> Result<CompositeSpace> {
    CompositeSpace::new(
        circuit.modes.iter().map(|m| Subsystem::mode(m.clone(), circuit.max_total_photons)).collect(),
    )
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn binomial(n: usize, k: usize) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Two-mode beam-splitter matrix on the truncated Fock space of two modes with
/// occupancies `0..=capacity`; local index `n_i·(capacity+1) + n_j`.
pub fn beam_splitter_matrix(theta: f64, phi: f64, capacity: usize) -> DMatrix<Complex64> {
    let d = capacity + 1;
    let mut m = DMatrix::<Complex64>::zeros(d * d, d * d);
    let c = Complex64::new(theta.cos(), 0.0);
    let r = Complex64::new(0.0, 1.0) * Complex64::from_polar(theta.sin(), phi);
    let r_back = Complex64::new(0.0, 1.0) * Complex64::from_polar(theta.sin(), -phi);
    for ni in 0..d {
        for nj in 0..d {
            let col = ni * d + nj;
            let n = ni + nj;
            if n > capacity {
                m[(col, col)] = Complex64::new(1.0, 0.0);
                continue;
            }
            // (c a†_i + r a†_j)^ni (r' a†_i + c a†_j)^nj |0⟩ / sqrt(ni! nj!)
            let norm_in = (factorial(ni) * factorial(nj)).sqrt();
            for p in 0..=ni {
                for q in 0..=nj {
                    let coeff = c.powu(p as u32)
                        * r.powu((ni - p) as u32)
                        * r_back.powu(q as u32)
                        * c.powu((nj - q) as u32)
                        * (binomial(ni, p) * binomial(nj, q));
                    let out_i = p + q;
                    let out_j = n - out_i;
                    let norm_out = (factorial(out_i) * factorial(out_j)).sqrt();
                    m[(out_i * d + out_j, col)] += coeff * (norm_out / norm_in);
                }
            }
        }
    }
    m
}

/// [`beam_splitter_matrix`] as an operator on a two-mode space labelled `i`, `j`.
pub fn beam_splitter_unitary(theta: f64, phi: f64, capacity: usize) -> Result<LinearOperator> {
    if capacity == 0 {
        return Err(Error::validation("capacity must be at least 1"));
    }
    let space = CompositeSpace::new(vec![Subsystem::mode("i", capacity), Subsystem::mode("j", capacity)])?;
    LinearOperator::new(space, beam_splitter_matrix(theta, phi, capacity))
}

/// Single-mode phase shift `|n⟩ → e^{inφ}|n⟩`.
pub fn phase_shift_matrix(phi: f64, capacity: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(capacity + 1, capacity + 1, |r, c| {
        if r == c {
            Complex64::from_polar(1.0, phi * r as f64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Fock basis state for `input` on the circuit's space.
pub fn input_state(circuit: &ModeCircuit, input: &PhotonInput) -> Result<StateVector> {
    let space = build_space(circuit)?;
    if input.total() > circuit.max_total_photons {
        return Err(Error::validation(format!(
            "input holds {} photons, circuit allows {}",
            input.total(),
            circuit.max_total_photons
        )));
    }
    let mut digits = vec![0; space.len()];
    for (mode, &n) in &input.occupancy {
        digits[space.require_index(mode).map_err(|_| Error::validation(format!("input mode '{mode}' not in circuit")))?] = n;
    }
    StateVector::basis(&space, &digits)
}

/// Apply the circuit's elements left to right to an existing state.
pub fn propagate(circuit: &ModeCircuit, state: &StateVector) -> Result<StateVector> {
    let space = state.space();
    if *space != build_space(circuit)? {
        return Err(Error::structural("state does not live on the circuit's space"));
    }
    let cap = circuit.max_total_photons;
    let mut out = state.clone();
    for el in &circuit.elements {
        out = match el {
            Element::BeamSplitter { modes, theta, phi } => {
                let targets = [space.require_index(&modes[0])?, space.require_index(&modes[1])?];
                apply_local(&beam_splitter_matrix(*theta, *phi, cap), &targets, &out)?
            }
            Element::PhaseShift { mode, phi } => {
                apply_local(&phase_shift_matrix(*phi, cap), &[space.require_index(mode)?], &out)?
            }
        };
    }
    Ok(out)
}

pub fn run_circuit(circuit: &ModeCircuit, input: &PhotonInput) -> Result<StateVector> {
    propagate(circuit, &input_state(circuit, input)?)
}

fn require_optical(space: &CompositeSpace) -> Result<()> {
    match space.subsystems().iter().find(|s| !matches!(s.kind, SubsystemKind::OpticalMode { .. })) {
        Some(s) => Err(Error::structural(format!("subsystem '{}' is not an optical mode", s.label))),
        None => Ok(()),
    }
}

/// Total photon number of each basis index.
fn photon_count(space: &CompositeSpace, idx: usize) -> usize {
    (0..space.len()).map(|k| space.digit(idx, k)).sum()
}

/// `⟨N_total⟩` for a (not necessarily normalized) state, divided by its norm.
pub fn mean_photon_number(state: &StateVector) -> Result<f64> {
    require_optical(state.space())?;
    let space = state.space();
    let n2 = state.norm_sqr();
    let total: f64 = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, a)| a.norm_sqr() * photon_count(space, i) as f64)
        .sum();
    Ok(total / n2)
}

/// Largest amplitude modulus on basis states whose photon number differs from `n`.
pub fn off_sector_weight(state: &StateVector, n: usize) -> Result<f64> {
    require_optical(state.space())?;
    let space = state.space();
    Ok(state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| photon_count(space, *i) != n)
        .map(|(_, a)| a.norm())
        .fold(0.0, f64::max))
}

fn pattern_label(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Joint click statistics of the present detectors.
///
/// Outcomes are click patterns over the present modes in space order, `'1'`
/// for a click; all `2^k` patterns are listed in lexicographic order. Modes
/// without a detector are not measured.
pub fn click_distribution(state: &StateVector, plan: &DetectorPlan) -> Result<ConditionalDistribution> {
    let space = state.space();
    require_optical(space)?;
    let present = plan.present_indices(space)?;
    if present.is_empty() {
        return ConditionalDistribution::new(vec![NO_MEASUREMENT.into()], vec![1.0]);
    }
    let k = present.len();
    if k > 20 {
        return Err(Error::Capacity(format!("{k} detectors give too many click patterns")));
    }
    let mut weights = vec![0.0; 1 << k];
    for (idx, amp) in state.amplitudes().iter().enumerate() {
        let w = amp.norm_sqr();
        if w == 0.0 {
            continue;
        }
        let key = present.iter().fold(0usize, |acc, &m| (acc << 1) | usize::from(space.digit(idx, m) > 0));
        weights[key] += w;
    }
    let total: f64 = weights.iter().sum();
    if total <= NULL_WEIGHT {
        return Err(Error::NullBranch { norm_sqr: total });
    }
    let labels = (0..1usize << k)
        .map(|key| pattern_label(&(0..k).map(|b| key >> (k - 1 - b) & 1 == 1).collect::<Vec<_>>()))
        .collect();
    ConditionalDistribution::new(labels, weights.iter().map(|w| w / total).collect())
}

/// Unnormalized projection of `state` onto a click pattern (`true` = click).
pub fn project_clicks(state: &StateVector, pattern: &[(String, bool)]) -> Result<StateVector> {
    let space = state.space();
    require_optical(space)?;
    let idx: Vec<(usize, bool)> =
        pattern.iter().map(|(m, c)| Ok((space.require_index(m)?, *c))).collect::<Result<_>>()?;
    let amps = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            if idx.iter().all(|&(k, click)| (space.digit(i, k) > 0) == click) {
                *a
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    StateVector::new(space.clone(), amps)
}

/// `P(target clicks | condition)` under joint projective detection of all
/// present modes. Condition and target modes must have present detectors.
pub fn conditional_click(
    state: &StateVector,
    plan: &DetectorPlan,
    condition: &[(String, bool)],
    target: &str,
) -> Result<f64> {
    require_optical(state.space())?;
    for mode in condition.iter().map(|(m, _)| m.as_str()).chain(std::iter::once(target)) {
        if !plan.is_present(mode) {
            return Err(Error::validation(format!("mode '{mode}' has no detector in the plan")));
        }
    }
    plan.present_indices(state.space())?;
    let conditioned = project_clicks(state, condition)?;
    let p_cond = conditioned.norm_sqr() / state.norm_sqr();
    if p_cond <= NULL_WEIGHT {
        return Err(Error::NullCondition { probability: p_cond });
    }
    let joint = project_clicks(&conditioned, &[(target.to_string(), true)])?.norm_sqr() / state.norm_sqr();
    Ok(joint / p_cond)
}
