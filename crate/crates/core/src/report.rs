//! Verdict records and their bit-stable JSON/CSV encodings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::ser::{Serialize, SerializeMap, Serializer};
use serde_json::value::RawValue;

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Pass,
    Fail,
    Skip(String),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skip(_) => "skip",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Diag {
    Num(f64),
    Int(i64),
    Text(String),
    Flag(bool),
}

impl From<f64> for Diag {
    fn from(x: f64) -> Self {
        Diag::Num(x)
    }
}

impl From<usize> for Diag {
    fn from(x: usize) -> Self {
        Diag::Int(x as i64)
    }
}

impl From<u64> for Diag {
    fn from(x: u64) -> Self {
        Diag::Int(x as i64)
    }
}

impl From<bool> for Diag {
    fn from(x: bool) -> Self {
        Diag::Flag(x)
    }
}

impl From<&str> for Diag {
    fn from(x: &str) -> Self {
        Diag::Text(x.to_string())
    }
}

impl From<String> for Diag {
    fn from(x: String) -> Self {
        Diag::Text(x)
    }
}

/// Fixed 17-significant-digit rendering; non-finite values become strings.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "\"nan\"".into()
    } else if x.is_infinite() {
        if x > 0.0 { "\"inf\"" } else { "\"-inf\"" }.into()
    } else {
        format!("{x:.16e}")
    }
}

fn raw(x: f64) -> Box<RawValue> {
    RawValue::from_string(format_number(x)).expect("formatted number is valid JSON")
}

impl Serialize for Diag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Diag::Num(x) => raw(*x).serialize(s),
            Diag::Int(i) => s.serialize_i64(*i),
            Diag::Text(t) => s.serialize_str(t),
            Diag::Flag(b) => s.serialize_bool(*b),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerdictReport {
    pub suite: String,
    pub case_id: String,
    pub computed: f64,
    pub bound: f64,
    pub margin: f64,
    pub relative_margin: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub diagnostics: BTreeMap<String, Diag>,
}

impl VerdictReport {
    fn base(suite: &str, case_id: &str, computed: f64, bound: f64, tolerance: f64, verdict: Verdict) -> Self {
        let margin = bound - computed;
        let relative_margin = if bound != 0.0 && bound.is_finite() { margin / bound.abs() } else { margin };
        VerdictReport {
            suite: suite.into(),
            case_id: case_id.into(),
            computed,
            bound,
            margin,
            relative_margin,
            tolerance,
            verdict,
            diagnostics: BTreeMap::new(),
        }
    }

    /// Passes iff `computed ≤ bound + tol·|bound|`.
    pub fn inequality(suite: &str, case_id: &str, computed: f64, bound: f64, tol: f64) -> Self {
        let ok = !computed.is_nan() && !bound.is_nan() && computed <= bound + tol * bound.abs();
        Self::base(suite, case_id, computed, bound, tol, if ok { Verdict::Pass } else { Verdict::Fail })
    }

    /// Passes iff `|computed − expected| ≤ tol·|expected|` (exact when `tol = 0`).
    pub fn equality(suite: &str, case_id: &str, computed: f64, expected: f64, tol: f64) -> Self {
        let ok = computed == expected || (computed - expected).abs() <= tol * expected.abs();
        Self::base(suite, case_id, computed, expected, tol, if ok { Verdict::Pass } else { Verdict::Fail })
    }

    /// Boolean check recorded as computed 0 / bound 0.
    pub fn check(suite: &str, case_id: &str, ok: bool) -> Self {
        Self::base(suite, case_id, 0.0, 0.0, 0.0, if ok { Verdict::Pass } else { Verdict::Fail })
    }

    pub fn skip(suite: &str, case_id: &str, reason: &str) -> Self {
        Self::base(suite, case_id, f64::NAN, f64::NAN, 0.0, Verdict::Skip(reason.into()))
    }

    pub fn with(mut self, key: &str, value: impl Into<Diag>) -> Self {
        self.diagnostics.insert(key.into(), value.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

impl Serialize for VerdictReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(10))?;
        m.serialize_entry("suite", &self.suite)?;
        m.serialize_entry("case_id", &self.case_id)?;
        m.serialize_entry("computed", &raw(self.computed))?;
        m.serialize_entry("bound", &raw(self.bound))?;
        m.serialize_entry("margin", &raw(self.margin))?;
        m.serialize_entry("relative_margin", &raw(self.relative_margin))?;
        m.serialize_entry("tolerance", &raw(self.tolerance))?;
        m.serialize_entry("verdict", self.verdict.label())?;
        let reason = match &self.verdict {
            Verdict::Skip(r) => Some(r.as_str()),
            _ => None,
        };
        m.serialize_entry("skip_reason", &reason)?;
        m.serialize_entry("diagnostics", &self.diagnostics)?;
        m.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Config(format!("unknown report format '{other}'"))),
        }
    }
}

#[derive(serde::Serialize)]
struct Document<'a> {
    schema_version: u32,
    seed: u64,
    reports: &'a [VerdictReport],
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Renders reports; identical inputs give identical bytes.
pub fn render(reports: &[VerdictReport], format: ReportFormat, seed: u64) -> Result<String> {
    match format {
        ReportFormat::Json => {
            let doc = Document { schema_version: SCHEMA_VERSION, seed, reports };
            let mut s = serde_json::to_string_pretty(&doc)?;
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Csv => {
            let mut s = String::new();
            writeln!(s, "# schema_version={SCHEMA_VERSION} seed={seed}").expect("string write");
            s.push_str("suite,case_id,computed,bound,margin,relative_margin,tolerance,verdict,skip_reason,diagnostics\n");
            for r in reports {
                let reason = match &r.verdict {
                    Verdict::Skip(x) => x.as_str(),
                    _ => "",
                };
                let strip = |x: f64| format_number(x).trim_matches('"').to_string();
                let diags = serde_json::to_string(&r.diagnostics)?;
                writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{}",
                    csv_field(&r.suite),
                    csv_field(&r.case_id),
                    strip(r.computed),
                    strip(r.bound),
                    strip(r.margin),
                    strip(r.relative_margin),
                    strip(r.tolerance),
                    r.verdict.label(),
                    csv_field(reason),
                    csv_field(&diags)
                )
                .expect("string write");
            }
            Ok(s)
        }
    }
}

/// Writes the rendered reports to `path`.
pub fn emit_report(reports: &[VerdictReport], format: ReportFormat, seed: u64, path: &std::path::Path) -> Result<()> {
    std::fs::write(path, render(reports, format, seed)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_list_is_a_valid_document() {
        let s = render(&[], ReportFormat::Json, 3).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["reports"].as_array().unwrap().len(), 0);
        assert_eq!(v["schema_version"], 1);
    }

    #[test]
    fn numbers_carry_seventeen_digits() {
        let r = VerdictReport::inequality("s", "c", 1.0 / 3.0, 1.0, 0.0);
        let s = render(&[r], ReportFormat::Json, 0).unwrap();
        assert!(s.contains("3.3333333333333331e-1"), "{s}");
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert!(v["reports"][0]["margin"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn non_finite_values_are_strings() {
        let r = VerdictReport::skip("s", "c", "singular slice");
        let s = render(&[r], ReportFormat::Json, 0).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["reports"][0]["computed"], "nan");
        assert_eq!(v["reports"][0]["skip_reason"], "singular slice");
    }

    #[test]
    fn csv_has_one_row_per_report() {
        let rows = vec![
            VerdictReport::inequality("a", "1", 1.0, 2.0, 0.0),
            VerdictReport::inequality("a", "2", 3.0, 2.0, 0.0).with("note", "x,y"),
        ];
        let s = render(&rows, ReportFormat::Csv, 0).unwrap();
        assert_eq!(s.lines().count(), 4);
        assert!(s.contains(",fail,"));
    }
}
