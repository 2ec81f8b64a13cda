//! Run configuration: JSON on disk, validated into core objects.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, ensure, Context};
use kropina_core::field::{ChartRegion, MetricField, OneFormField, Params, Variance, VectorField};
use kropina_core::kropina::MIN_SAMPLES;
use kropina_core::navigation::NavigationData;
use kropina_core::{parse, Expr, KropinaMetric};
use serde::{Deserialize, Serialize};

pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Spray,
    Ricci,
    Einstein,
    Navigation,
    Killing,
    Scurv,
    Flag,
    Berwald,
    Conformal,
    Lemma31,
    Lemma41,
}

impl Check {
    pub const ALL: [Check; 11] = [
        Check::Spray,
        Check::Ricci,
        Check::Einstein,
        Check::Navigation,
        Check::Killing,
        Check::Scurv,
        Check::Flag,
        Check::Berwald,
        Check::Conformal,
        Check::Lemma31,
        Check::Lemma41,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Spray => "spray",
            Check::Ricci => "ricci",
            Check::Einstein => "einstein",
            Check::Navigation => "navigation",
            Check::Killing => "killing",
            Check::Scurv => "scurv",
            Check::Flag => "flag",
            Check::Berwald => "berwald",
            Check::Conformal => "conformal",
            Check::Lemma31 => "lemma31",
            Check::Lemma41 => "lemma41",
        }
    }

    /// Cross-oracle 1e-8, curvature identities 1e-7, gates 1e-6.
    pub fn default_tolerance(self) -> f64 {
        match self {
            Check::Spray => 1e-8,
            Check::Ricci | Check::Scurv => 1e-7,
            Check::Navigation => 1e-12,
            _ => 1e-6,
        }
    }

    /// Checks that reduce over samples and need at least [`MIN_SAMPLES`].
    pub fn is_statistical(self) -> bool {
        matches!(self, Check::Einstein | Check::Killing | Check::Conformal)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .with_context(|| format!("unknown check {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `metric` is `α`, `form` is `β`.
    Kropina,
    /// `metric` is `h`, `wind` is `W`.
    Navigation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl Chart {
    pub fn region(&self) -> ChartRegion {
        match self {
            Chart::Box { lower, upper } => ChartRegion::Box {
                lower: lower.clone(),
                upper: upper.clone(),
            },
            Chart::Ball { center, radius } => ChartRegion::Ball {
                center: center.clone(),
                radius: *radius,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindVariance {
    Upper,
    Lower,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub dimension: usize,
    pub mode: Mode,
    /// Upper triangle of the metric, row by row.
    pub metric: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wind: Option<Vec<String>>,
    #[serde(default = "default_variance")]
    pub wind_variance: WindVariance,
    pub chart: Chart,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_margin")]
    pub margin: f64,
    #[serde(default)]
    pub tolerances: BTreeMap<Check, f64>,
    pub checks: Vec<Check>,
    /// Constant `K` for the flag check; estimated from `Ric/F²` if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag_curvature: Option<f64>,
    /// `φ` for the conformal check.
    #[serde(default = "default_phi")]
    pub conformal_factor: String,
}

fn default_variance() -> WindVariance {
    WindVariance::Upper
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_margin() -> f64 {
    kropina_core::sampling::DEFAULT_MARGIN
}

fn default_phi() -> String {
    "2".into()
}

/// A configuration turned into core objects.
#[derive(Clone, Debug)]
pub enum Subject {
    Kropina(KropinaMetric),
    Navigation(NavigationData),
}

impl RunConfig {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        serde_json::from_str(text).context("malformed config")
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn tolerance(&self, check: Check) -> f64 {
        self.tolerances
            .get(&check)
            .copied()
            .unwrap_or(check.default_tolerance())
    }

    fn params(&self) -> Params {
        self.parameters.clone()
    }

    fn parse_list(&self, what: &str, texts: &[String]) -> anyhow::Result<Vec<Expr>> {
        let names: Vec<&str> = self.parameters.keys().map(String::as_str).collect();
        texts
            .iter()
            .enumerate()
            .map(|(i, t)| {
                parse(t, self.dimension, &names).with_context(|| format!("{what}[{i}] = {t:?}"))
            })
            .collect()
    }

    pub fn conformal_factor(&self) -> anyhow::Result<Expr> {
        let names: Vec<&str> = self.parameters.keys().map(String::as_str).collect();
        parse(&self.conformal_factor, self.dimension, &names).context("conformal_factor")
    }

    /// Checks everything that can be checked without sampling.
    pub fn validate(&self) -> anyhow::Result<Subject> {
        let n = self.dimension;
        ensure!(n >= 2, "dimension must be at least 2");
        ensure!(!self.checks.is_empty(), "no checks requested");
        ensure!(self.samples > 0, "sample count must be positive");
        ensure!(
            self.margin.is_finite() && self.margin >= 0.0 && self.margin < 1.0,
            "margin must lie in [0, 1)"
        );
        if self.checks.iter().any(|c| c.is_statistical()) {
            ensure!(
                self.samples >= MIN_SAMPLES,
                "statistical checks need at least {MIN_SAMPLES} samples, got {}",
                self.samples
            );
        }
        for (check, tol) in &self.tolerances {
            ensure!(
                tol.is_finite() && *tol > 0.0,
                "tolerance for {check} must be positive"
            );
        }
        let region = self.chart.region();
        ensure!(
            region.dimension() == n,
            "chart has dimension {}, expected {n}",
            region.dimension()
        );
        region.validate().context("chart")?;
        self.conformal_factor()?;
        let metric = self.parse_list("metric", &self.metric)?;
        let metric = MetricField::new(n, metric, region, self.params()).context("metric")?;
        match self.mode {
            Mode::Kropina => {
                ensure!(self.wind.is_none(), "kropina mode takes `form`, not `wind`");
                let form = self.form.as_ref().context("kropina mode needs `form`")?;
                let form = OneFormField::new(self.parse_list("form", form)?, self.params())
                    .context("form")?;
                let k = KropinaMetric::new(metric, form)?.with_margin(self.margin);
                Ok(Subject::Kropina(k))
            }
            Mode::Navigation => {
                ensure!(
                    self.form.is_none(),
                    "navigation mode takes `wind`, not `form`"
                );
                let wind = self.wind.as_ref().context("navigation mode needs `wind`")?;
                let variance = match self.wind_variance {
                    WindVariance::Upper => Variance::Upper,
                    WindVariance::Lower => Variance::Lower,
                };
                let w = VectorField::new(self.parse_list("wind", wind)?, variance, self.params())
                    .context("wind")?;
                Ok(Subject::Navigation(NavigationData::new(metric, w)?))
            }
        }
    }

    /// Applies a `--tol CHECK=EPS` override.
    pub fn set_tolerance(&mut self, spec: &str) -> anyhow::Result<()> {
        let (name, value) = spec.split_once('=').context("expected CHECK=EPS")?;
        let value: f64 = value
            .trim()
            .parse()
            .with_context(|| format!("tolerance {value:?}"))?;
        if !(value.is_finite() && value > 0.0) {
            bail!("tolerance must be positive");
        }
        self.tolerances.insert(name.trim().parse()?, value);
        Ok(())
    }
}

/// Parses `k=v`.
pub fn parse_assignment(spec: &str) -> anyhow::Result<(String, f64)> {
    let (k, v) = spec.split_once('=').context("expected NAME=VALUE")?;
    let v: f64 = v.trim().parse().with_context(|| format!("value {v:?}"))?;
    Ok((k.trim().to_string(), v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(checks: &str) -> String {
        format!(
            r#"{{"dimension": 2, "mode": "kropina", "metric": ["1", "0", "1"], "form": ["k", "0"],
                "parameters": {{"k": 2}}, "chart": {{"box": {{"lower": [-1, -1], "upper": [1, 1]}}}},
                "checks": {checks}}}"#
        )
    }

    #[test]
    fn defaults_fill_in() {
        let cfg = RunConfig::from_json(&flat(r#"["spray"]"#)).unwrap();
        assert_eq!((cfg.samples, cfg.seed), (DEFAULT_SAMPLES, DEFAULT_SEED));
        assert_eq!(cfg.tolerance(Check::Spray), 1e-8);
        assert_eq!(cfg.tolerance(Check::Einstein), 1e-6);
        assert!(matches!(cfg.validate().unwrap(), Subject::Kropina(_)));
    }

    #[test]
    fn json_round_trip() {
        let cfg = RunConfig::from_json(&flat(r#"["spray", "lemma41"]"#)).unwrap();
        assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }

    #[test]
    fn unknown_fields_and_checks_rejected() {
        assert!(RunConfig::from_json(&flat(r#"["spray"], "extra": 1"#)).is_err());
        assert!(RunConfig::from_json(&flat(r#"["geodesic"]"#)).is_err());
    }

    #[test]
    fn statistical_checks_need_samples() {
        let mut cfg = RunConfig::from_json(&flat(r#"["einstein"]"#)).unwrap();
        cfg.samples = MIN_SAMPLES - 1;
        assert!(cfg.validate().is_err());
        cfg.checks = vec![Check::Spray];
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn mode_fields_must_match() {
        let mut cfg = RunConfig::from_json(&flat(r#"["spray"]"#)).unwrap();
        cfg.mode = Mode::Navigation;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn bad_expressions_and_charts_rejected() {
        let mut cfg = RunConfig::from_json(&flat(r#"["spray"]"#)).unwrap();
        cfg.form = Some(vec!["q".into(), "0".into()]);
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::from_json(&flat(r#"["spray"]"#)).unwrap();
        cfg.chart = Chart::Box {
            lower: vec![1.0, -1.0],
            upper: vec![-1.0, 1.0],
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn tolerance_overrides() {
        let mut cfg = RunConfig::from_json(&flat(r#"["spray"]"#)).unwrap();
        cfg.set_tolerance("ricci=1e-3").unwrap();
        assert_eq!(cfg.tolerance(Check::Ricci), 1e-3);
        assert!(cfg.set_tolerance("ricci=-1").is_err());
        assert!(cfg.set_tolerance("ricci").is_err());
        assert!(cfg.set_tolerance("nope=1").is_err());
    }

    #[test]
    fn check_names_parse_back() {
        for c in Check::ALL {
            assert_eq!(c.name().parse::<Check>().unwrap(), c);
        }
    }

    #[test]
    fn assignments() {
        assert_eq!(
            parse_assignment(" mu = -1 ").unwrap(),
            ("mu".to_string(), -1.0)
        );
        assert!(parse_assignment("mu").is_err());
        assert!(parse_assignment("mu=x").is_err());
    }
}
