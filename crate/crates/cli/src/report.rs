//! Report rendering. Floats are printed with 12 decimals in both formats so
//! that identical configs give byte-identical output.

use std::fmt::Write as _;
use std::io;

use nonloc_core::nonlocal::{MembershipResult, SpinMeasurementAngles};
use nonloc_core::scenarios::ScenarioResult;
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::config::SCHEMA_VERSION;

pub const DECIMALS: usize = 12;

#[derive(Debug, Serialize)]
pub struct Report<'a> {
    pub schema_version: u32,
    pub command: &'a str,
    pub config_hash: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reconstruction: Option<&'a str>,
    pub result: &'a ScenarioResult,
}

impl<'a> Report<'a> {
    pub fn new(command: &'a str, config_hash: &'a str, result: &'a ScenarioResult) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command,
            config_hash,
            reconstruction: result.reconstruction.as_deref(),
            result,
        }
    }
}

/// Fixed-point number text; negative zero prints as zero.
pub fn fixed(x: f64) -> String {
    let s = format!("{x:.DECIMALS$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

/// Pretty JSON with fixed-point floats.
struct FixedFormatter(PrettyFormatter<'static>);

impl Formatter for FixedFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fixed(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("reports serialize");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

pub const TSV_HEADER: [&str; 5] = ["section", "name", "condition", "outcome", "value"];

struct Tsv(String);

impl Tsv {
    fn row(&mut self, cells: [&str; 5]) {
        let cleaned: Vec<String> = cells.iter().map(|c| c.replace(['\t', '\n', '\r'], " ")).collect();
        let _ = writeln!(self.0, "{}", cleaned.join("\t"));
    }

    fn angles(&mut self, angles: &SpinMeasurementAngles) {
        for (party, list) in [("alice", &angles.alice), ("bob", &angles.bob)] {
            for (k, a) in list.iter().enumerate() {
                let name = format!("{party}[{k}]");
                self.row(["angle", &name, "", "theta", &fixed(a.theta)]);
                self.row(["angle", &name, "", "phi", &fixed(a.phi)]);
            }
        }
    }

    fn membership(&mut self, m: &MembershipResult) {
        self.row(["membership", "verdict", "", "", m.verdict()]);
        match m {
            MembershipResult::Feasible { weights } => {
                for w in weights {
                    let strategy = format!("alice={:?},bob={:?}", w.strategy.alice, w.strategy.bob);
                    self.row(["membership", "weight", "", &strategy, &fixed(w.weight)]);
                }
            }
            MembershipResult::Infeasible { certificate: c } => {
                self.row(["certificate", "bound", "", "", &fixed(c.bound)]);
                self.row(["certificate", "input_value", "", "", &fixed(c.input_value)]);
                self.row(["certificate", "critical_visibility", "", "", &fixed(c.critical_visibility)]);
                self.row(["certificate", "denominator_log2", "", "", &c.denominator_log2.to_string()]);
                for (i, (coef, num)) in c.coefficients.iter().zip(&c.numerators).enumerate() {
                    let (x, y, a, b) = split_index(i, c.shape.y, c.shape.a, c.shape.b);
                    let cond = format!("x={x},y={y}");
                    let outcome = format!("a={a},b={b}");
                    self.row(["certificate", "coefficient", &cond, &outcome, &fixed(*coef)]);
                    self.row(["certificate", "numerator", &cond, &outcome, &num.to_string()]);
                }
            }
        }
    }
}

fn split_index(i: usize, y_count: usize, a_count: usize, b_count: usize) -> (usize, usize, usize, usize) {
    let b = i % b_count;
    let a = (i / b_count) % a_count;
    let y = (i / (b_count * a_count)) % y_count;
    let x = i / (b_count * a_count * y_count);
    (x, y, a, b)
}

/// Tab-separated rows under [`TSV_HEADER`]; undefined table rows print
/// `undefined` in the value column.
pub fn to_tsv(report: &Report<'_>) -> String {
    let mut t = Tsv(String::new());
    t.row(TSV_HEADER);
    t.row(["report", "schema_version", "", "", &report.schema_version.to_string()]);
    t.row(["report", "command", "", "", report.command]);
    t.row(["report", "config_hash", "", "", report.config_hash]);
    if let Some(tag) = report.reconstruction {
        t.row(["report", "reconstruction", "", "", tag]);
    }
    let r = report.result;
    t.row(["report", "scenario", "", "", &r.scenario]);
    for (k, v) in &r.metadata {
        t.row(["metadata", k, "", "", v]);
    }
    for (k, v) in &r.values {
        t.row(["value", k, "", "", &fixed(*v)]);
    }
    for (k, z) in &r.amplitudes {
        t.row(["amplitude", k, "", "re", &fixed(z.re)]);
        t.row(["amplitude", k, "", "im", &fixed(z.im)]);
    }
    for table in &r.tables {
        for row in &table.rows {
            match &row.distribution {
                None => t.row(["table", &table.name, &row.condition, "", "undefined"]),
                Some(d) => {
                    for (label, p) in d.iter() {
                        t.row(["table", &table.name, &row.condition, label, &fixed(p)]);
                    }
                }
            }
        }
    }
    if let Some(angles) = &r.angles {
        t.angles(angles);
    }
    if let Some(m) = &r.membership {
        t.membership(m);
    }
    t.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_point_text() {
        assert_eq!(fixed(1.0), "1.000000000000");
        assert_eq!(fixed(-1e-15), "0.000000000000");
        assert_eq!(fixed(-0.5), "-0.500000000000");
        assert_eq!(fixed(2f64.sqrt() * 2.0), "2.828427124746");
    }

    #[test]
    fn json_uses_fixed_floats_and_declared_order() {
        let mut r = ScenarioResult::new("x");
        r.values.insert("p".into(), 0.25);
        let json = to_json(&Report::new("run", "abc", &r));
        assert!(json.contains("\"p\": 0.250000000000"), "{json}");
        let order: Vec<usize> =
            ["schema_version", "command", "config_hash", "result"].iter().map(|k| json.find(k).unwrap()).collect();
        assert!(order.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn index_split_is_row_major() {
        assert_eq!(split_index(0, 2, 2, 2), (0, 0, 0, 0));
        assert_eq!(split_index(5, 2, 2, 2), (0, 1, 0, 1));
        assert_eq!(split_index(15, 2, 2, 2), (1, 1, 1, 1));
    }
}
