//! Outcome records shared by every verification routine.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inapplicable,
}

/// A named verification outcome with its measured quantities.
///
/// Metrics live in a `BTreeMap`, so serialization order is stable and equal
/// inputs give byte-identical JSON. Non-finite metrics are stored as
/// `±f64::MAX` (NaN as `f64::MAX`) to keep the JSON numeric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub status: CheckStatus,
    pub metrics: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, tolerance: f64, seed: u64) -> Self {
        Self {
            name: name.into(),
            passed: false,
            status: CheckStatus::Fail,
            metrics: BTreeMap::new(),
            tolerance,
            seed,
            note: None,
        }
    }

    pub fn inapplicable(name: impl Into<String>, reason: impl Into<String>, seed: u64) -> Self {
        Self {
            name: name.into(),
            passed: true,
            status: CheckStatus::Inapplicable,
            metrics: BTreeMap::new(),
            tolerance: 0.0,
            seed,
            note: Some(reason.into()),
        }
    }

    pub fn metric(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        let v = if value.is_nan() {
            f64::MAX
        } else if value.is_infinite() {
            f64::MAX.copysign(value)
        } else {
            value
        };
        self.metrics.insert(key.into(), v);
        self
    }

    pub fn with_metric(mut self, key: impl Into<String>, value: f64) -> Self {
        self.metric(key, value);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn conclude(mut self, passed: bool) -> Self {
        self.passed = passed;
        self.status = if passed { CheckStatus::Pass } else { CheckStatus::Fail };
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).copied()
    }

    pub fn is_inapplicable(&self) -> bool {
        self.status == CheckStatus::Inapplicable
    }
}

/// Plain-text table, one line per report followed by its metrics.
pub fn render_table(reports: &[CheckReport]) -> String {
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:<12}  {:>10}  {:>20}",
        "check", "status", "tolerance", "seed"
    );
    for r in reports {
        let status = match r.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Inapplicable => "inapplicable",
        };
        let _ = writeln!(
            out,
            "{:<width$}  {:<12}  {:>10.3e}  {:>20}",
            r.name, status, r.tolerance, r.seed
        );
        for (k, v) in &r.metrics {
            let _ = writeln!(out, "{:<width$}    {k} = {v:.6e}", "");
        }
        if let Some(note) = &r.note {
            let _ = writeln!(out, "{:<width$}    note: {note}", "");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_schema_and_sanitizing() {
        let r = CheckReport::new("demo", 1e-9, 7)
            .with_metric("b", 2.0)
            .with_metric("a", f64::INFINITY)
            .conclude(true);
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.starts_with(r#"{"name":"demo","passed":true,"status":"pass","metrics":{"a":"#));
        let back: CheckReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.get("a"), Some(f64::MAX));
    }

    #[test]
    fn inapplicable_does_not_fail() {
        let r = CheckReport::inapplicable("x", "needs p >= 2", 1);
        assert!(r.passed && r.is_inapplicable());
        assert!(render_table(&[r]).contains("inapplicable"));
    }
}
