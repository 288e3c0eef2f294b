//! Acceptance report: one PASS/FAIL line per criterion.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, TAU};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use nonloc_core::isomorphism::{photon_state, photon_to_spins, spins_of, spins_to_photon};
use nonloc_core::nonlocal::{
    behavior_from_state, chsh_max, chsh_value, enumerate_strategies, lhv_membership, reconstruct, BipartiteBehavior,
    BlochAngles, Shape, SpinMeasurementAngles,
};
use nonloc_core::optics::{
    beam_splitter_unitary, click_distribution, off_sector_weight, phase_shift_matrix, run_circuit, DetectorPlan,
    Element, ModeCircuit, PhotonInput,
};
use nonloc_core::prepost::{abl_probabilities, born_probabilities, postselect, PrePostEnsemble};
use nonloc_core::qcore::{
    apply, basis_projector, inner, is_unitary, projector_onto, schmidt_coefficients, CompositeSpace,
    LinearOperator, ProjectiveMeasurement, StateVector, Subsystem,
};
use nonloc_core::scenarios::{hardy_conditionals, hardy_default, ThreeBoxScenario, BUILTINS};
use nonloc_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn random_unit(rng: &mut impl Rng, space: &CompositeSpace) -> StateVector {
    let v: Vec<Complex64> =
        (0..space.total_dimension()).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    StateVector::new(space.clone(), v.into_iter().map(|z| z / n).collect()).unwrap()
}

fn random_pair(rng: &mut impl Rng) -> (Complex64, Complex64) {
    let p: f64 = rng.gen_range(0.0..1.0);
    let alpha = Complex64::from_polar(p.sqrt(), rng.gen_range(0.0..TAU));
    let beta = Complex64::from_polar((1.0 - p).sqrt(), rng.gen_range(0.0..TAU));
    (alpha, beta)
}

fn three_box_certainty(k: usize) -> Check {
    let scenario = ThreeBoxScenario::new(if k == 0 {
        nonloc_core::scenarios::Searched::A
    } else {
        nonloc_core::scenarios::Searched::B
    });
    let m = scenario.search_measurement().map_err(err)?.expect("a box is searched");
    let d = abl_probabilities(&scenario.ensemble, &m).map_err(err)?;
    let p = d.probabilities();
    let dev = (p[0] - 1.0).abs().max(p[1].abs());
    ensure(dev <= 1e-12, format!("deviation {dev:e}"))?;
    Ok(format!("(found, not found) = ({:.15}, {:.3e})", p[0], p[1]))
}

fn criterion_3() -> Check {
    let scenario = ThreeBoxScenario::new(nonloc_core::scenarios::Searched::A);
    let space = nonloc_core::scenarios::box_space();
    let not_a = basis_projector(&space, &[0]).map_err(err)?.complement();
    let (collapsed, _) = postselect(scenario.ensemble.pre(), &not_a).map_err(err)?;
    let h = c(FRAC_1_SQRT_2, 0.0);
    let expected = StateVector::new(space, vec![c(0.0, 0.0), h, h]).map_err(err)?;
    let dev = collapsed.max_abs_diff(&expected).map_err(err)?;
    let ov = inner(scenario.ensemble.post(), &collapsed).map_err(err)?.norm();
    ensure(dev <= 1e-12, format!("state deviation {dev:e}"))?;
    ensure(ov <= 1e-12, format!("overlap with post {ov:e}"))?;
    Ok(format!("state deviation {dev:.1e}, |overlap with post| {ov:.1e}"))
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut entry, mut trip, mut schmidt) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let (alpha, beta) = random_pair(&mut rng);
        let spins = spins_of(&photon_to_spins(alpha, beta).map_err(err)?).map_err(err)?;
        let expected = [c(0.0, 0.0), alpha, beta, c(0.0, 0.0)];
        for (a, b) in spins.amplitudes().iter().zip(expected) {
            entry = entry.max((a - b).norm());
        }
        let back = spins_to_photon(&spins).map_err(err)?;
        trip = trip.max(back.max_abs_diff(&photon_state(alpha, beta).map_err(err)?).map_err(err)?);
        let mut got = schmidt_coefficients(&spins, &[0]).map_err(err)?;
        got.sort_by(|a, b| b.total_cmp(a));
        let mut want = [alpha.norm(), beta.norm()];
        want.sort_by(|a, b| b.total_cmp(a));
        for (g, w) in got.iter().zip(want) {
            schmidt = schmidt.max((g - w).abs());
        }
    }
    ensure(entry <= 1e-12 && trip <= 1e-12 && schmidt <= 1e-10, "tolerance exceeded")
        .map_err(|e| format!("{e}: entry {entry:e}, round trip {trip:e}, schmidt {schmidt:e}"))?;
    Ok(format!("100 pairs: entry {entry:.1e}, round trip {trip:.1e}, schmidt {schmidt:.1e}"))
}

fn criterion_5() -> Check {
    let h = c(FRAC_1_SQRT_2, 0.0);
    let spins = spins_of(&photon_to_spins(h, h).map_err(err)?).map_err(err)?;
    let (value, angles) = chsh_max(&spins).map_err(err)?;
    let tsirelson = 2.0 * 2f64.sqrt();
    ensure(
        (tsirelson - 1e-4..=tsirelson + 1e-6).contains(&value),
        format!("chsh_max {value:.12} outside [2√2 − 1e-4, 2√2 + 1e-6]"),
    )?;
    let behavior = behavior_from_state(&spins, &angles).map_err(err)?;
    let verdict = lhv_membership(&behavior).map_err(err)?;
    let cert = verdict.certificate().ok_or("behavior reported LHV-feasible")?;
    let bound = cert.bound_numerator();
    let vertices = enumerate_strategies(behavior.shape()).map_err(err)?;
    ensure(vertices.len() == 16, format!("{} vertices", vertices.len()))?;
    let worst = vertices.iter().map(|v| cert.vertex_numerator(v)).max().unwrap();
    ensure(worst <= bound, format!("vertex numerator {worst} above bound {bound}"))?;
    ensure(cert.bound == 2.0, format!("bound {}", cert.bound))?;
    let on_behavior = cert.evaluate(&behavior).map_err(err)?;
    ensure(on_behavior > 2.8, format!("certificate value {on_behavior}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut family = 0.0f64;
    for _ in 0..20 {
        let (alpha, beta) = random_pair(&mut rng);
        let s = spins_of(&photon_to_spins(alpha, beta).map_err(err)?).map_err(err)?;
        let (v, _) = chsh_max(&s).map_err(err)?;
        let p = alpha.norm_sqr();
        family = family.max((v - 2.0 * (1.0 + 4.0 * p * (1.0 - p)).sqrt()).abs());
    }
    ensure(family <= 1e-3, format!("family deviation {family:e}"))?;
    Ok(format!(
        "chsh_max {value:.12}, certificate: vertices ≤ 2 exactly, value {on_behavior:.6}; family deviation {family:.1e}"
    ))
}

fn criterion_6() -> Check {
    let spins = spins_of(&photon_to_spins(c(1.0, 0.0), c(0.0, 0.0)).map_err(err)?).map_err(err)?;
    let (value, angles) = chsh_max(&spins).map_err(err)?;
    ensure((value - 2.0).abs() <= 1e-4, format!("chsh_max {value}"))?;
    let behavior = behavior_from_state(&spins, &angles).map_err(err)?;
    let verdict = lhv_membership(&behavior).map_err(err)?;
    let weights = verdict.weights().ok_or("product state reported nonlocal")?;
    let rebuilt = reconstruct(behavior.shape(), weights);
    let dev = rebuilt.iter().zip(behavior.table()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    ensure(dev <= 1e-8, format!("reconstruction deviation {dev:e}"))?;
    Ok(format!("chsh_max {value:.12}, {} strategies, reconstruction {dev:.1e}", weights.len()))
}

fn criterion_7() -> Check {
    let start = Instant::now();
    let scenario = hardy_default().map_err(err)?;
    let r = hardy_conditionals(&scenario).map_err(err)?;
    let value = |k: &str| r.value(k).ok_or_else(|| format!("missing value {k}"));
    let u1 = value("p_u1_given_f1f2[U1=present,U2=absent]")?;
    let u2 = value("p_u2_given_f1f2[U1=absent,U2=present]")?;
    let joint = value("p_u1_and_u2_given_f1f2[U1=present,U2=present]")?;
    let elapsed = start.elapsed().as_secs_f64();
    ensure(r.reconstruction.is_some(), "no reconstruction tag")?;
    ensure(r.table("u_given_f1f2").is_some_and(|t| t.rows.len() == 4), "table does not have four rows")?;
    ensure((u1 - 1.0).abs() <= 1e-10, format!("P(u1 | F1F2, U1 only) = {u1}"))?;
    ensure((u2 - 1.0).abs() <= 1e-10, format!("P(u2 | F1F2, U2 only) = {u2}"))?;
    ensure(joint < 1.0 - 1e-6, format!("P(u1 ∧ u2 | F1F2, both) = {joint}"))?;
    ensure(elapsed < 60.0, format!("took {elapsed:.1}s"))?;
    Ok(format!("P(u1|F)={u1:.12}, P(u2|F)={u2:.12}, both present P(u1∧u2|F)={joint:.12}, {elapsed:.2}s"))
}

fn random_circuit(rng: &mut impl Rng) -> (ModeCircuit, PhotonInput) {
    let n = rng.gen_range(2..=4);
    let names: Vec<String> = (0..n).map(|i| format!("m{i}")).collect();
    let elements = (0..rng.gen_range(1..=8))
        .map(|_| {
            let i = rng.gen_range(0..n);
            if rng.gen_bool(0.75) {
                let j = (i + rng.gen_range(1..n)) % n;
                Element::beam_splitter(&names[i], &names[j], rng.gen_range(0.0..FRAC_PI_2), rng.gen_range(0.0..TAU))
            } else {
                Element::phase_shift(&names[i], rng.gen_range(0.0..TAU))
            }
        })
        .collect();
    let circuit = ModeCircuit::new(names.clone(), elements, 3).unwrap();
    let mut left = rng.gen_range(1..=3);
    let occ: Vec<(&str, usize)> = names
        .iter()
        .map(|m| {
            let k = rng.gen_range(0..=left);
            left -= k;
            (m.as_str(), k)
        })
        .collect();
    (circuit, PhotonInput::new(occ))
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);

    for _ in 0..64 {
        let (theta, phi, cap) = (rng.gen_range(0.0..FRAC_PI_2), rng.gen_range(0.0..TAU), rng.gen_range(1..=3));
        ensure(is_unitary(&beam_splitter_unitary(theta, phi, cap).map_err(err)?, 1e-10), "beam splitter")?;
        let space = CompositeSpace::new(vec![Subsystem::mode("m", cap)]).map_err(err)?;
        let ps = LinearOperator::new(space, phase_shift_matrix(phi, cap)).map_err(err)?;
        ensure(is_unitary(&ps, 1e-10), "phase shift")?;
    }

    let mut leak = 0.0f64;
    for _ in 0..200 {
        let (circuit, input) = random_circuit(&mut rng);
        let out = run_circuit(&circuit, &input).map_err(err)?;
        leak = leak.max(off_sector_weight(&out, input.total()).map_err(err)?);
        let plan = DetectorPlan::present(circuit.modes().iter().map(String::as_str));
        let total: f64 = click_distribution(&out, &plan).map_err(err)?.probabilities().iter().sum();
        ensure((total - 1.0).abs() <= 1e-10, "click distribution not normalized")?;
    }
    ensure(leak <= 1e-12, format!("photon number leak {leak:e}"))?;

    let space = CompositeSpace::new(vec![Subsystem::spin("s"), Subsystem::position("p", 3)]).map_err(err)?;
    let mut born_dev = 0.0f64;
    for _ in 0..30 {
        let pre = random_unit(&mut rng, &space);
        let phi = random_unit(&mut rng, &space);
        let m = ProjectiveMeasurement::binary(projector_onto(&[phi]).map_err(err)?, "yes", "no").map_err(err)?;
        let born = born_probabilities(&pre, &m).map_err(err)?;
        let mut mixed = [0.0; 2];
        for k in 0..space.total_dimension() {
            let post = StateVector::basis_index(&space, k).map_err(err)?;
            let ens = PrePostEnsemble::new(pre.clone(), post).map_err(err)?;
            let w: f64 = ens.branch_amplitudes(&m).map_err(err)?.iter().map(|a| a.norm_sqr()).sum();
            if w <= 1e-20 {
                continue;
            }
            for (acc, p) in mixed.iter_mut().zip(abl_probabilities(&ens, &m).map_err(err)?.probabilities()) {
                *acc += w * p;
            }
        }
        for (x, y) in mixed.iter().zip(born.probabilities()) {
            born_dev = born_dev.max((x - y).abs());
        }
    }
    ensure(born_dev <= 1e-10, format!("Born reduction {born_dev:e}"))?;

    let boxes = CompositeSpace::new(vec![Subsystem::position("box", 4)]).map_err(err)?;
    for _ in 0..30 {
        let pre = random_unit(&mut rng, &boxes);
        let m = ProjectiveMeasurement::binary(
            projector_onto(&[random_unit(&mut rng, &boxes)]).map_err(err)?,
            "yes",
            "no",
        )
        .map_err(err)?;
        let r = apply(&m.projectors()[1], &pre).map_err(err)?.normalized().map_err(err)?;
        let raw = random_unit(&mut rng, &boxes);
        let ov = inner(&r, &raw).map_err(err)?;
        let post = raw.add(&r.scaled(-ov)).map_err(err)?.normalized().map_err(err)?;
        let ens = PrePostEnsemble::new(pre.clone(), post).map_err(err)?;
        let p = abl_probabilities(&ens, &m).map_err(err)?.probabilities()[0];
        ensure(p == 1.0, format!("constructed certainty gave {p}"))?;
        let generic = PrePostEnsemble::new(pre, random_unit(&mut rng, &boxes)).map_err(err)?;
        let b = generic.branch_amplitudes(&m).map_err(err)?;
        let p = abl_probabilities(&generic, &m).map_err(err)?.probabilities()[0];
        ensure((b[1].norm() > 1e-9) == (p < 1.0), "certainty without vanishing branch")?;
    }

    let pair = CompositeSpace::new(vec![Subsystem::spin("A"), Subsystem::spin("B")]).map_err(err)?;
    let angle = |r: &mut ChaCha8Rng| BlochAngles::new(r.gen_range(0.0..PI), r.gen_range(0.0..TAU));
    let mut gap = 0.0f64;
    let mut quantum = Vec::new();
    for _ in 0..100 {
        let s = random_unit(&mut rng, &pair);
        let angles = SpinMeasurementAngles::new(
            vec![angle(&mut rng), angle(&mut rng)],
            vec![angle(&mut rng), angle(&mut rng)],
        )
        .map_err(err)?;
        let b = behavior_from_state(&s, &angles).map_err(err)?;
        gap = gap.max(b.signaling_gap());
        quantum.push(b);
    }
    ensure(gap <= 1e-12, format!("signaling gap {gap:e}"))?;

    let shapes = [Shape::CHSH, Shape::new(2, 3, 2, 2).map_err(err)?, Shape::new(2, 2, 3, 2).map_err(err)?];
    let mut rebuild = 0.0f64;
    for i in 0..50 {
        let shape = shapes[i % shapes.len()];
        let vertices = enumerate_strategies(shape).map_err(err)?;
        let parts: Vec<(f64, BipartiteBehavior)> = (0..rng.gen_range(1..=6))
            .map(|_| {
                let v = &vertices[rng.gen_range(0..vertices.len())];
                (rng.gen_range(0.01..1.0), BipartiteBehavior::deterministic(shape, v).unwrap())
            })
            .collect();
        let total: f64 = parts.iter().map(|p| p.0).sum();
        let refs: Vec<(f64, &BipartiteBehavior)> = parts.iter().map(|(w, b)| (w / total, b)).collect();
        let local = BipartiteBehavior::mixture(&refs).map_err(err)?;
        let verdict = lhv_membership(&local).map_err(err)?;
        let w = verdict.weights().ok_or("local behavior reported nonlocal")?;
        let rebuilt = reconstruct(shape, w);
        rebuild = rebuild.max(rebuilt.iter().zip(local.table()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }
    ensure(rebuild <= 1e-8, format!("reconstruction {rebuild:e}"))?;

    let pr = BipartiteBehavior::pr_box();
    let mut certified = 0;
    for q in &quantum {
        let w: f64 = rng.gen_range(0.0..0.6);
        let beh = BipartiteBehavior::mixture(&[(1.0 - w, q), (w, &pr)]).map_err(err)?;
        if chsh_value(&beh).map_err(err)? <= 2.0 + 1e-3 {
            continue;
        }
        let verdict = lhv_membership(&beh).map_err(err)?;
        let cert = verdict.certificate().ok_or("CHSH-violating behavior reported local")?;
        let bound = cert.bound_numerator();
        for v in enumerate_strategies(beh.shape()).map_err(err)? {
            ensure(cert.vertex_numerator(&v) <= bound, "vertex above certificate bound")?;
        }
        certified += 1;
        if certified == 10 {
            break;
        }
    }
    ensure(certified == 10, format!("only {certified} nonlocal behaviors found"))?;
    Ok(format!(
        "leak {leak:.1e}, Born {born_dev:.1e}, signaling {gap:.1e}, LP rebuild {rebuild:.1e}, 10 certificates exact"
    ))
}

fn criterion_9() -> Check {
    let bin = env!("CARGO_BIN_EXE_nonloc");
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR"));
    let mut runs = 0;
    for name in BUILTINS {
        let path = dir.join(format!("acceptance-{name}.json"));
        std::fs::write(&path, format!("{{\"schema_version\": 1, \"scenario\": \"{name}\"}}")).map_err(err)?;
        for format in ["json", "tsv"] {
            let run = || Command::new(bin).arg("run").arg(&path).args(["--format", format]).output();
            let (a, b) = (run().map_err(err)?, run().map_err(err)?);
            ensure(a.status.success(), format!("{name}: {}", String::from_utf8_lossy(&a.stderr)))?;
            ensure(a.stdout == b.stdout && !a.stdout.is_empty(), format!("{name} ({format}) differs between runs"))?;
            runs += 1;
        }
    }
    Ok(format!("{runs} builtin/format pairs byte-identical across two runs"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("three-box certainty A", || three_box_certainty(0)),
        ("three-box certainty B", || three_box_certainty(1)),
        ("orthogonality mechanism", criterion_3),
        ("photon-to-spin isomorphism", criterion_4),
        ("nonlocality of the isomorphic state", criterion_5),
        ("locality boundary", criterion_6),
        ("Hardy conditionals", criterion_7),
        ("property suites", criterion_8),
        ("CLI determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
