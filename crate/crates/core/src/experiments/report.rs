//! `report.json` and `ratios.csv` writers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use super::config::ScenarioConfig;
use crate::estimate::Estimate;

/// One row of the ratio table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Row {
    pub n: u64,
    pub p_hat: f64,
    pub p_stderr: f64,
    pub normalizer: f64,
    pub ratio: f64,
}

impl Row {
    pub fn new(n: u64, p: Estimate, normalizer: f64) -> Self {
        Row { n, p_hat: p.value, p_stderr: p.stderr, normalizer, ratio: p.value / normalizer }
    }

    pub fn ratio_stderr(&self) -> f64 {
        self.p_stderr / self.normalizer
    }
}

/// A limit constant and where it came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitConstant {
    pub value: f64,
    pub stderr: Option<f64>,
    pub source: String,
}

/// An acceptance band check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub pass: bool,
}

impl Check {
    pub fn within(name: impl Into<String>, value: f64, min: Option<f64>, max: Option<f64>) -> Self {
        let pass = value.is_finite() && min.is_none_or(|m| value >= m) && max.is_none_or(|m| value <= m);
        Check { name: name.into(), value, min, max, pass }
    }

    pub fn flag(name: impl Into<String>, pass: bool) -> Self {
        Check { name: name.into(), value: if pass { 1.0 } else { 0.0 }, min: Some(1.0), max: None, pass }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub scenario: String,
    pub config: ScenarioConfig,
    pub rows: Vec<Row>,
    pub limit_constant: Option<LimitConstant>,
    pub target: Option<f64>,
    pub details: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub pass: bool,
}

impl Report {
    pub fn new(config: &ScenarioConfig) -> Self {
        Report {
            scenario: config.scenario.name().to_string(),
            config: config.clone(),
            rows: Vec::new(),
            limit_constant: None,
            target: None,
            details: BTreeMap::new(),
            checks: Vec::new(),
            warnings: Vec::new(),
            pass: true,
        }
    }

    pub fn detail(&mut self, key: &str, v: impl Serialize) {
        self.details.insert(key.to_string(), serde_json::to_value(v).expect("serializable"));
    }

    pub fn check(&mut self, c: Check) {
        self.pass &= c.pass;
        self.checks.push(c);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn ratios_csv(&self) -> String {
        let mut s = String::from("n,p_hat,p_stderr,normalizer,ratio\n");
        for r in &self.rows {
            writeln!(s, "{},{},{},{},{}", r.n, r.p_hat, r.p_stderr, r.normalizer, r.ratio).unwrap();
        }
        s
    }

    /// Writes `report.json` and `ratios.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> crate::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.to_json())?;
        std::fs::write(dir.join("ratios.csv"), self.ratios_csv())?;
        Ok(())
    }
}
