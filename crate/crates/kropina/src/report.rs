//! Run reports: JSON for files and golden comparisons, text for terminals.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use kropina_core::residual::Stats;
use serde::Serialize;
use serde_json::Value;

use crate::config::{Check, RunConfig};

pub const TOOL: &str = "kropina";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The hypotheses of the check do not hold; not counted as a failure.
    NotApplicable,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::NotApplicable => "not_applicable",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRef {
    pub index: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: Check,
    pub status: Status,
    pub tolerance: f64,
    pub max_residual: Option<f64>,
    pub worst_sample: Option<SampleRef>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub values: BTreeMap<String, Value>,
}

impl CheckReport {
    pub fn new(name: Check, tolerance: f64) -> Self {
        Self {
            name,
            status: Status::Fail,
            tolerance,
            max_residual: None,
            worst_sample: None,
            message: None,
            values: BTreeMap::new(),
        }
    }

    pub fn value(&mut self, key: &str, v: impl Into<Value>) {
        self.values.insert(key.into(), v.into());
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl Summary {
    pub fn of(s: &Stats) -> Option<Self> {
        (s.count > 0).then(|| Self {
            min: s.min,
            max: s.max,
            mean: s.mean(),
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Estimates {
    /// Conformal factor `c` of `r_ij = c a_ij`.
    pub c: Option<Summary>,
    /// Einstein scalar of `α` (two dimensions).
    pub lambda: Option<Summary>,
    /// The auxiliary function `f` (three or more dimensions).
    pub f: Option<Summary>,
    /// `σ` from the invariant table.
    pub sigma: Option<Summary>,
    /// `Ric/F²` from the definitional Ricci curvature.
    pub sigma_direct: Option<Summary>,
    /// Einstein scalar of the navigation metric `h`.
    pub delta: Option<Summary>,
    /// Constant flag curvature estimate `Ric/((n−1)F²)`.
    pub flag_curvature: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplingInfo {
    pub requested: usize,
    pub admissible: usize,
    pub skipped: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub status: Status,
    pub config: RunConfig,
    pub sampling: SamplingInfo,
    pub checks: Vec<CheckReport>,
    pub estimates: Estimates,
    pub wall_time_ms: f64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn check(&self, name: Check) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// JSON with the wall time zeroed, for byte comparisons.
    pub fn to_json_stable(&self) -> String {
        let mut r = self.clone();
        r.wall_time_ms = 0.0;
        r.to_json()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let name = self.config.name.as_deref().unwrap_or("config");
        let _ = writeln!(
            out,
            "{name}: {} ({} of {} samples admissible)",
            self.status.as_str(),
            self.sampling.admissible,
            self.sampling.requested
        );
        for c in &self.checks {
            let residual = c
                .max_residual
                .map_or("-".to_string(), |v| format!("{v:.3e}"));
            let _ = write!(
                out,
                "  {:<11} {:<14} max {:>10}  tol {:.0e}",
                c.name.name(),
                c.status.as_str(),
                residual,
                c.tolerance
            );
            if let Some(m) = &c.message {
                let _ = write!(out, "  ({m})");
            }
            out.push('\n');
        }
        let e = &self.estimates;
        for (label, s) in [
            ("c", e.c),
            ("lambda", e.lambda),
            ("f", e.f),
            ("sigma", e.sigma),
            ("Ric/F^2", e.sigma_direct),
            ("delta", e.delta),
        ] {
            if let Some(s) = s {
                let _ = writeln!(
                    out,
                    "  {label:<8} mean {:.9} in [{:.9}, {:.9}]",
                    s.mean, s.min, s.max
                );
            }
        }
        if let Some(k) = e.flag_curvature {
            let _ = writeln!(out, "  K        {k:.9}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::builtin;

    fn report() -> Report {
        let mut check = CheckReport::new(Check::Spray, 1e-8);
        check.status = Status::Pass;
        check.max_residual = Some(1e-15);
        check.value("note", "x");
        Report {
            tool: TOOL,
            version: VERSION,
            status: Status::Pass,
            config: builtin("flat-parallel", &Default::default()).unwrap(),
            sampling: SamplingInfo {
                requested: 100,
                admissible: 100,
                skipped: vec![],
            },
            checks: vec![check],
            estimates: Estimates::default(),
            wall_time_ms: 12.5,
        }
    }

    #[test]
    fn stable_json_zeroes_wall_time() {
        let r = report();
        let v: Value = serde_json::from_str(&r.to_json_stable()).unwrap();
        assert_eq!(v["wall_time_ms"], 0.0);
        assert_eq!(v["checks"][0]["name"], "spray");
        assert_eq!(v["checks"][0]["values"]["note"], "x");
        assert!(v["checks"][0].get("message").is_none());
    }

    #[test]
    fn not_applicable_does_not_fail() {
        let mut r = report();
        r.status = Status::NotApplicable;
        assert!(r.passed());
        r.status = Status::Fail;
        assert!(!r.passed());
    }

    #[test]
    fn text_lists_checks() {
        let text = report().to_text();
        assert!(text.starts_with("flat-parallel: pass"));
        assert!(text.contains("spray"));
        assert!(report().check(Check::Ricci).is_none());
    }

    #[test]
    fn summary_of_empty_stats_is_none() {
        assert!(Summary::of(&Stats::default()).is_none());
    }
}
