use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use super::config::ExperimentConfig;
use crate::grid::GridFunction;

/// One pass/fail line of a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub observed: f64,
    /// Bound the observation was compared against.
    pub threshold: f64,
    pub config_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

/// A radial profile written as a CSV file next to the report.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub function: GridFunction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub rows: Vec<Value>,
    pub summary: Value,
    pub checks: Vec<Check>,
    pub passed: bool,
    #[serde(skip)]
    pub series: Vec<Series>,
}

impl Report {
    pub fn new(command: &str, config: &ExperimentConfig) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.seed,
            config_hash: config.hash(),
            config: config.clone(),
            rows: Vec::new(),
            summary: json!({}),
            checks: Vec::new(),
            passed: true,
            series: Vec::new(),
        }
    }

    /// Appends a row, tagging it with the config hash.
    pub fn row(&mut self, mut value: Value) {
        if let Value::Object(map) = &mut value {
            map.insert("config_hash".into(), Value::String(self.config_hash.clone()));
        }
        self.rows.push(value);
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, observed: f64, threshold: f64) {
        self.check_with(name, passed, observed, threshold, None);
    }

    pub fn check_with(
        &mut self,
        name: impl Into<String>,
        passed: bool,
        observed: f64,
        threshold: f64,
        witness: Option<Value>,
    ) {
        self.passed &= passed;
        self.checks.push(Check {
            name: name.into(),
            passed,
            observed,
            threshold,
            config_hash: self.config_hash.clone(),
            witness,
        });
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// `r,u,mode,config_hash` lines for every node and mode.
pub fn series_csv(series: &Series, config_hash: &str) -> String {
    let mut out = String::from("r,u,mode,config_hash\n");
    let nodes = series.function.mesh().nodes();
    for (j, m) in series.function.modes().iter().enumerate() {
        for (r, u) in nodes.iter().zip(m) {
            let _ = writeln!(out, "{r:e},{u:e},{j},{config_hash}");
        }
    }
    out
}

/// Writes `<command>.json` and one `<command>_<label>.csv` per series into `dir`.
pub fn write_report(report: &Report, dir: &Path) -> crate::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    let main = dir.join(format!("{}.json", report.command));
    std::fs::write(&main, report.to_json())?;
    paths.push(main);
    for s in &report.series {
        let path = dir.join(format!("{}_{}.csv", report.command, s.label));
        std::fs::write(&path, series_csv(s, &report.config_hash))?;
        paths.push(path);
    }
    Ok(paths)
}
