use num_complex::Complex64;

use super::result::ScenarioResult;
use crate::error::{Error, Result};
use crate::isomorphism::{photon_to_spins, spins_of};
use crate::nonlocal::{behavior_from_state, chsh_max, lhv_membership, MembershipResult, CERTIFICATE_MARGIN};
use crate::qcore::schmidt_coefficients;

const SPIN_LABELS: [&str; 4] = ["up,up", "up,down", "down,up", "down,down"];

/// Moves `α|1,0⟩ + β|0,1⟩` onto two spins and tests the spins for
/// nonlocality at their CHSH-optimal settings.
pub fn isomorphism_demo(alpha: Complex64, beta: Complex64) -> Result<ScenarioResult> {
    let spins = spins_of(&photon_to_spins(alpha, beta)?)?;
    let mut result = ScenarioResult::new("isomorphism");
    result.amplitudes.insert("alpha".into(), alpha);
    result.amplitudes.insert("beta".into(), beta);
    for (label, amp) in SPIN_LABELS.iter().zip(spins.amplitudes()) {
        result.amplitudes.insert(format!("spin[{label}]"), *amp);
    }
    let schmidt = schmidt_coefficients(&spins, &[0])?;
    for (k, s) in schmidt.iter().enumerate() {
        result.values.insert(format!("schmidt[{k}]"), *s);
    }
    let (value, angles) = chsh_max(&spins)?;
    result.values.insert("chsh_max".into(), value);
    let behavior = behavior_from_state(&spins, &angles)?;
    let membership = match lhv_membership(&behavior) {
        Ok(m) => Some(m),
        // Violations below the certificate margin cannot be certified.
        Err(Error::Certificate(_)) if value <= 2.0 + CERTIFICATE_MARGIN => None,
        Err(e) => return Err(e),
    };
    let verdict = match &membership {
        Some(MembershipResult::Feasible { .. }) => "feasible",
        Some(MembershipResult::Infeasible { .. }) => "infeasible",
        None => "undecided",
    };
    result.metadata.insert("verdict".into(), verdict.into());
    if let Some(MembershipResult::Infeasible { certificate }) = &membership {
        result.values.insert("certificate_bound".into(), certificate.bound);
        result.values.insert("certificate_value".into(), certificate.input_value);
    }
    result.angles = Some(angles);
    result.membership = membership;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn product_state_is_local() {
        let r = isomorphism_demo(c(1.0), c(0.0)).unwrap();
        assert!((r.value("chsh_max").unwrap() - 2.0).abs() < 1e-4);
        assert_eq!(r.metadata["verdict"], "feasible");
    }

    #[test]
    fn maximally_entangled_is_nonlocal() {
        let h = 1.0 / 2f64.sqrt();
        let r = isomorphism_demo(c(h), c(h)).unwrap();
        assert!((r.value("chsh_max").unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-4);
        assert_eq!(r.metadata["verdict"], "infeasible");
        assert!(r.value("certificate_value").unwrap() > 2.8);
    }

    #[test]
    fn partially_entangled() {
        let r = isomorphism_demo(c(0.8f64.sqrt()), c(0.2f64.sqrt())).unwrap();
        assert!((r.value("chsh_max").unwrap() - 2.0 * 1.64f64.sqrt()).abs() < 1e-3);
        assert_eq!(r.metadata["verdict"], "infeasible");
        assert!((r.value("schmidt[0]").unwrap() - 0.8f64.sqrt()).abs() < 1e-12);
    }
}
