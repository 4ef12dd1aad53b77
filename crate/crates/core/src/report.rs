//! Machine-readable verification reports.

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Short label of the identity being checked.
    pub paper_ref: String,
    pub status: Status,
    pub max_error: Option<f64>,
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    /// Exact check: passes iff `ok`.
    pub fn exact(name: &str, label: &str, ok: bool) -> Check {
        Check {
            name: name.into(),
            paper_ref: label.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            max_error: None,
            tolerance: None,
            detail: None,
        }
    }

    /// Numeric check: passes iff `err` is finite and below `tol`.
    pub fn within(name: &str, label: &str, err: f64, tol: f64) -> Check {
        Check {
            name: name.into(),
            paper_ref: label.into(),
            status: if err.is_finite() && err < tol {
                Status::Pass
            } else {
                Status::Fail
            },
            max_error: Some(if err.is_finite() { err } else { f64::MAX }),
            tolerance: Some(tol),
            detail: None,
        }
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Check {
        self.detail = Some(d.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub config: Value,
    pub checks: Vec<Check>,
    /// Command-specific payload such as a solve or kernel report.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub results: Option<Value>,
}

impl Report {
    pub fn new(config: Value, checks: Vec<Check>) -> Report {
        Report {
            tool_version: TOOL_VERSION.to_string(),
            config,
            checks,
            results: None,
        }
    }

    pub fn with_results(mut self, results: Value) -> Report {
        self.results = Some(results);
        self
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_finite_error_fails() {
        assert!(!Check::within("x", "y", f64::NAN, 1.0).passed());
        assert!(Check::within("x", "y", 0.5, 1.0).passed());
        assert!(!Check::within("x", "y", 1.0, 1.0).passed());
    }

    #[test]
    fn json_shape() {
        let r = Report::new(serde_json::json!({"seed": 1}), vec![Check::exact("a", "b", true)]);
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["checks"][0]["status"], "pass");
        assert!(v["tool_version"].is_string());
    }
}
