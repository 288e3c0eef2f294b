//! WebAssembly bindings for the static demo page in `www/`. Every export
//! returns a scenario result as a JSON string.

use nonloc_core::scenarios::{hardy_conditionals, hardy_default, isomorphism_demo, three_box, ScenarioResult, Searched};
use nonloc_core::Complex64;
use wasm_bindgen::prelude::*;

fn to_json(result: nonloc_core::Result<ScenarioResult>) -> Result<String, String> {
    let result = result.map_err(|e| e.to_string())?;
    serde_json::to_string(&result).map_err(|e| e.to_string())
}

pub fn three_box_json(searched: &str) -> Result<String, String> {
    let searched: Searched = searched.parse().map_err(|e: nonloc_core::Error| e.to_string())?;
    to_json(three_box(searched))
}

/// Normalizes `(α, β)` before the transfer.
pub fn isomorphism_json(alpha_re: f64, alpha_im: f64, beta_re: f64, beta_im: f64) -> Result<String, String> {
    let (alpha, beta) = (Complex64::new(alpha_re, alpha_im), Complex64::new(beta_re, beta_im));
    let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
    if !norm.is_finite() || norm < 1e-12 {
        return Err("α and β must not both vanish".into());
    }
    to_json(isomorphism_demo(alpha / norm, beta / norm))
}

pub fn hardy_json(u1: bool, u2: bool) -> Result<String, String> {
    let mut scenario = hardy_default().map_err(|e| e.to_string())?;
    scenario.u1_present = u1;
    scenario.u2_present = u2;
    to_json(hardy_conditionals(&scenario))
}

#[wasm_bindgen]
pub fn three_box_report(searched: &str) -> Result<String, JsError> {
    three_box_json(searched).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn isomorphism_report(alpha_re: f64, alpha_im: f64, beta_re: f64, beta_im: f64) -> Result<String, JsError> {
    isomorphism_json(alpha_re, alpha_im, beta_re, beta_im).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn hardy_report(u1: bool, u2: bool) -> Result<String, JsError> {
    hardy_json(u1, u2).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> serde_json::Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn three_box_a() {
        let v = parse(&three_box_json("A").unwrap());
        assert_eq!(v["values"]["probability_found"], 1.0);
        assert!(three_box_json("D").is_err());
    }

    #[test]
    fn isomorphism_normalizes_input() {
        let v = parse(&isomorphism_json(1.0, 0.0, 1.0, 0.0).unwrap());
        let chsh = v["values"]["chsh_max"].as_f64().unwrap();
        assert!((chsh - 2.0 * 2f64.sqrt()).abs() < 1e-6);
        assert_eq!(v["metadata"]["verdict"], "infeasible");
        assert!(isomorphism_json(0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn hardy_plan_is_recorded() {
        let v = parse(&hardy_json(true, false).unwrap());
        assert_eq!(v["metadata"]["configured_plan"], "U1=present,U2=absent");
        assert_eq!(v["values"]["p_u1_given_f1f2[U1=present,U2=absent]"], 1.0);
    }
}
