//! Result records, CSV tables and the JSON run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use corrdyn::functionals::GuardStatus;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    AtMost,
    AtLeast,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
    /// Reported but not counted towards the exit code.
    pub informational: bool,
}

impl CheckRecord {
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, relation: Relation::AtMost, pass: value <= tolerance, informational: false }
    }

    pub fn at_least(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, relation: Relation::AtLeast, pass: value >= tolerance, informational: false }
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GuardRecord {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub status: GuardStatus,
}

impl GuardRecord {
    /// `value < bound` is within the guard.
    pub fn below(name: impl Into<String>, value: f64, bound: f64) -> Self {
        let status = if value < bound { GuardStatus::Within } else { GuardStatus::Violated };
        Self { name: name.into(), value, bound, status }
    }
}

#[derive(Clone, Debug)]
pub struct Table {
    pub file: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: impl Into<String>, header: &[&str]) -> Self {
        Self { file: file.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn from_numeric(file: impl Into<String>, header: Vec<String>, rows: Vec<Vec<f64>>) -> Self {
        let rows = rows.into_iter().map(|r| r.into_iter().map(num).collect()).collect();
        Self { file: file.into(), header, rows }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// Shortest round-trip formatting, so identical runs give identical files.
pub fn num(x: f64) -> String {
    format!("{x}")
}

/// Everything a command produces.
#[derive(Debug, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub checks: Vec<CheckRecord>,
    pub guards: Vec<GuardRecord>,
    pub truncation: Option<usize>,
    pub results: serde_json::Map<String, serde_json::Value>,
}

impl Outcome {
    pub fn result(&mut self, key: &str, value: impl Serialize) {
        self.results.insert(key.to_string(), serde_json::to_value(value).expect("serializable result"));
    }

    pub fn checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass || c.informational)
    }

    pub fn guards_hold(&self) -> bool {
        self.guards.iter().all(|g| g.status == GuardStatus::Within)
    }
}

#[derive(Serialize)]
pub struct Manifest<'a, C: Serialize> {
    pub command: &'a str,
    pub version: &'a str,
    pub seed: u64,
    pub threads: usize,
    pub strict: bool,
    pub config: &'a C,
    pub truncation_n_max: Option<usize>,
    pub guards: &'a [GuardRecord],
    pub checks: &'a [CheckRecord],
    pub results: &'a serde_json::Map<String, serde_json::Value>,
    pub outputs: Vec<String>,
    pub exit_code: i32,
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> String {
    format!("{}: {e}", path.display())
}

pub fn write_table(dir: &Path, table: &Table) -> Result<PathBuf, String> {
    let path = dir.join(&table.file);
    let mut w = csv::Writer::from_path(&path).map_err(|e| io_error(&path, e))?;
    w.write_record(&table.header).map_err(|e| io_error(&path, e))?;
    for row in &table.rows {
        w.write_record(row).map_err(|e| io_error(&path, e))?;
    }
    w.flush().map_err(|e| io_error(&path, e))?;
    Ok(path)
}

pub fn write_manifest<C: Serialize>(dir: &Path, manifest: &Manifest<C>) -> Result<PathBuf, String> {
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(manifest).map_err(|e| io_error(&path, e))?;
    fs::write(&path, text + "\n").map_err(|e| io_error(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_relations() {
        assert!(CheckRecord::at_most("a", 1e-12, 1e-10).pass);
        assert!(!CheckRecord::at_least("b", 0.5, 0.9).pass);
        let mut o = Outcome::default();
        o.checks.push(CheckRecord::at_least("b", 0.5, 0.9).informational());
        assert!(o.checks_pass());
        o.checks.push(CheckRecord::at_most("c", 1.0, 0.1));
        assert!(!o.checks_pass());
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1e-300, -2.5e17, 1.0 / 3.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }
}
