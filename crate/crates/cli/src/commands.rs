//! One function per subcommand, each turning a parsed config into a
//! [`ScenarioResult`]. Errors while building inputs from the config are
//! config errors; errors from the computation are scenario errors.

use std::f64::consts::FRAC_1_SQRT_2;

use nonloc_core::isomorphism::{photon_to_spins, spin_pair_space, spins_of};
use nonloc_core::nonlocal::{
    behavior_from_state, chsh_max, chsh_value, lhv_membership, BipartiteBehavior, MembershipResult, Shape,
    CERTIFICATE_MARGIN,
};
use nonloc_core::optics::{click_distribution, mean_photon_number, run_circuit, DetectorPlan};
use nonloc_core::prepost::{abl_probabilities, born_probabilities, ConditionalDistribution, PrePostEnsemble};
use nonloc_core::qcore::{
    basis_projector, inner, projector_onto, schmidt_coefficients, ProjectiveMeasurement, StateVector,
};
use nonloc_core::scenarios::{
    hardy_conditionals, hardy_default, isomorphism_demo, three_box, HardyScenario, ProbabilityTable,
    ScenarioResult, Searched, TableRow,
};
use nonloc_core::serde_complex::ReIm;
use nonloc_core::Complex64;

use crate::config::{AblConfig, BehaviorConfig, ChshConfig, HardyDetectors, InlineCircuit, InlineScenario, RunConfig};
use crate::CliError;

fn input<T>(what: &str, r: nonloc_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Config(format!("{what}: {e}")))
}

fn complexes(v: &[ReIm]) -> Vec<Complex64> {
    v.iter().copied().map(Complex64::from).collect()
}

pub fn run(c: &RunConfig) -> Result<ScenarioResult, CliError> {
    match (&c.scenario, &c.scenario_inline) {
        (Some(name), None) => match name.as_str() {
            "three-box" => Ok(three_box(c.searched.unwrap_or(Searched::None))?),
            "hardy-default" => {
                let mut s = hardy_default()?;
                apply_detectors(&mut s, c.detectors.as_ref());
                Ok(hardy_conditionals(&s)?)
            }
            "isomorphism" => isomorphism(c),
            other => Err(CliError::Config(format!("unknown scenario '{other}'"))),
        },
        (None, Some(InlineScenario::Hardy(s))) => {
            let mut s = (**s).clone();
            apply_detectors(&mut s, c.detectors.as_ref());
            input("scenario_inline.hardy", s.validate())?;
            Ok(hardy_conditionals(&s)?)
        }
        (None, Some(InlineScenario::Circuit(circuit))) => inline_circuit(circuit),
        _ => Err(CliError::Config("exactly one of `scenario` or `scenario_inline` is required".into())),
    }
}

fn apply_detectors(s: &mut HardyScenario, detectors: Option<&HardyDetectors>) {
    if let Some(d) = detectors {
        s.u1_present = d.u1;
        s.u2_present = d.u2;
    }
}

fn isomorphism(c: &RunConfig) -> Result<ScenarioResult, CliError> {
    let h = ReIm { re: FRAC_1_SQRT_2, im: 0.0 };
    let alpha = Complex64::from(c.alpha.unwrap_or(h));
    let beta = Complex64::from(c.beta.unwrap_or(h));
    let mut result = isomorphism_demo(alpha, beta)?;
    if let Some(angles) = &c.angles {
        let spins = spins_of(&photon_to_spins(alpha, beta)?)?;
        let behavior = input("angles", behavior_from_state(&spins, angles))?;
        let value = input("angles", chsh_value(&behavior))?;
        result.values.insert("chsh[given angles]".into(), value);
        result.tables.push(behavior_table("behavior[given angles]", &behavior)?);
    }
    Ok(result)
}

fn inline_circuit(c: &InlineCircuit) -> Result<ScenarioResult, CliError> {
    let output = input("scenario_inline.circuit", run_circuit(&c.circuit, &c.input))?;
    let plan = DetectorPlan::present(c.detectors.iter().map(String::as_str));
    let clicks = input("scenario_inline.circuit.detectors", click_distribution(&output, &plan))?;
    let mut result = ScenarioResult::new("circuit");
    result.metadata.insert("modes".into(), c.circuit.modes().join(","));
    result.metadata.insert("detectors".into(), c.detectors.join(","));
    let occupancy: Vec<String> = c.input.occupancy.iter().map(|(m, n)| format!("{m}={n}")).collect();
    result.metadata.insert("input".into(), occupancy.join(","));
    result.values.insert("mean_photon_number".into(), mean_photon_number(&output)?);
    let mut table = ProbabilityTable::new("clicks");
    table.rows.push(TableRow::defined("output", clicks));
    result.tables.push(table);
    Ok(result)
}

pub fn abl(c: &AblConfig) -> Result<ScenarioResult, CliError> {
    let space = &c.space;
    let pre = input("pre", StateVector::new(space.clone(), complexes(&c.pre)))?;
    let post = input("post", StateVector::new(space.clone(), complexes(&c.post)))?;
    input("pre", pre.require_unit("pre-selected state"))?;
    input("post", post.require_unit("post-selected state"))?;
    let mut projectors = Vec::with_capacity(c.measurement.len());
    for (i, outcome) in c.measurement.iter().enumerate() {
        let what = format!("measurement[{i}]");
        let p = match (&outcome.indices, &outcome.vectors) {
            (Some(idx), None) => input(&what, basis_projector(space, idx))?,
            (None, Some(vectors)) => {
                let states = vectors
                    .iter()
                    .map(|v| input(&what, StateVector::new(space.clone(), complexes(v))))
                    .collect::<Result<Vec<_>, _>>()?;
                input(&what, projector_onto(&states))?
            }
            _ => return Err(CliError::Config(format!("{what}: give exactly one of `indices` or `vectors`"))),
        };
        projectors.push(p);
    }
    let labels = c.measurement.iter().map(|o| o.label.clone()).collect();
    let measurement = input("measurement", ProjectiveMeasurement::new(labels, projectors))?;
    let ensemble = input("post", PrePostEnsemble::new(pre, post))?;

    let mut result = ScenarioResult::new("abl");
    result.amplitudes.insert("overlap".into(), inner(ensemble.post(), ensemble.pre())?);
    for (label, amp) in measurement.labels().iter().zip(ensemble.branch_amplitudes(&measurement)?) {
        result.amplitudes.insert(format!("branch[{label}]"), amp);
    }
    let mut born = ProbabilityTable::new("born");
    born.rows.push(TableRow::defined("pre", born_probabilities(ensemble.pre(), &measurement)?));
    let mut table = ProbabilityTable::new("abl");
    table.rows.push(TableRow::defined("pre,post", abl_probabilities(&ensemble, &measurement)?));
    result.tables.push(born);
    result.tables.push(table);
    Ok(result)
}

fn behavior_table(name: &str, behavior: &BipartiteBehavior) -> Result<ProbabilityTable, CliError> {
    let s = behavior.shape();
    let mut table = ProbabilityTable::new(name);
    for x in 0..s.x {
        for y in 0..s.y {
            let mut labels = Vec::with_capacity(s.a * s.b);
            let mut probs = Vec::with_capacity(s.a * s.b);
            for a in 0..s.a {
                for b in 0..s.b {
                    labels.push(format!("a={a},b={b}"));
                    probs.push(behavior.p(a, b, x, y));
                }
            }
            let d = ConditionalDistribution::new(labels, probs)?;
            table.rows.push(TableRow::defined(format!("x={x},y={y}"), d));
        }
    }
    Ok(table)
}

/// Verdict, with violations inside the certificate margin left undecided.
fn membership(behavior: &BipartiteBehavior, chsh: Option<f64>) -> Result<Option<MembershipResult>, CliError> {
    match lhv_membership(behavior) {
        Ok(m) => Ok(Some(m)),
        Err(nonloc_core::Error::Certificate(_)) if chsh.is_some_and(|v| v <= 2.0 + CERTIFICATE_MARGIN) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn record_membership(result: &mut ScenarioResult, m: Option<MembershipResult>) {
    let verdict = m.as_ref().map_or("undecided", MembershipResult::verdict);
    result.metadata.insert("verdict".into(), verdict.into());
    if let Some(cert) = m.as_ref().and_then(MembershipResult::certificate) {
        result.values.insert("certificate_bound".into(), cert.bound);
        result.values.insert("certificate_value".into(), cert.input_value);
        result.values.insert("critical_visibility".into(), cert.critical_visibility);
    }
    result.membership = m;
}

pub fn chsh(c: &ChshConfig) -> Result<ScenarioResult, CliError> {
    let state = input("state", StateVector::new(spin_pair_space(), complexes(&c.state)))?;
    input("state", state.require_unit("two-spin state"))?;
    let mut result = ScenarioResult::new("chsh");
    let (value, angles, source) = match &c.angles {
        Some(angles) => {
            let behavior = input("angles", behavior_from_state(&state, angles))?;
            (input("angles", chsh_value(&behavior))?, angles.clone(), "given")
        }
        None => {
            let (value, angles) = chsh_max(&state)?;
            (value, angles, "optimized")
        }
    };
    result.metadata.insert("angles".into(), source.into());
    result.values.insert("chsh".into(), value);
    for (k, s) in schmidt_coefficients(&state, &[0])?.iter().enumerate() {
        result.values.insert(format!("schmidt[{k}]"), *s);
    }
    let behavior = behavior_from_state(&state, &angles)?;
    result.tables.push(behavior_table("behavior", &behavior)?);
    let m = membership(&behavior, Some(value))?;
    record_membership(&mut result, m);
    result.angles = Some(angles);
    Ok(result)
}

pub fn lhv_check(c: &BehaviorConfig) -> Result<ScenarioResult, CliError> {
    let [x, y] = c.settings;
    let [a, b] = c.outcomes;
    let shape = input("settings", Shape::new(x, y, a, b))?;
    let behavior = input("table", BipartiteBehavior::new(shape, c.table.clone()))?;
    let mut result = ScenarioResult::new("lhv-check");
    result.metadata.insert("shape".into(), format!("settings={x}x{y},outcomes={a}x{b}"));
    let chsh = if shape == Shape::CHSH { Some(chsh_value(&behavior)?) } else { None };
    if let Some(v) = chsh {
        result.values.insert("chsh".into(), v);
    }
    result.tables.push(behavior_table("behavior", &behavior)?);
    let m = membership(&behavior, chsh)?;
    record_membership(&mut result, m);
    Ok(result)
}
