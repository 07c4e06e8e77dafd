use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA: &str = "orbitforge-report/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    /// `"literature"` for values quoted from the source, `"derived"` for values
    /// computed by an independent oracle, absent for structural invariants.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into(), origin: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub result: Value,
}

/// A report plus the scan table that goes to `report.csv`.
#[derive(Clone, Debug)]
pub struct Output {
    pub report: Report,
    pub csv: String,
}

impl Output {
    pub fn new(command: &str, seed: u64, result: Value, checks: Vec<Check>, csv: String) -> Self {
        Self { report: Report { schema: SCHEMA.into(), command: command.into(), scenario: None, seed, checks, result }, csv }
    }

    pub fn passed(&self) -> bool {
        self.report.checks.iter().all(|c| c.passed)
    }

    pub fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn csv(&self) -> String {
        if !self.csv.is_empty() {
            return self.csv.clone();
        }
        let mut out = String::from("check,passed,detail\n");
        for c in &self.report.checks {
            let _ = writeln!(out, "{},{},\"{}\"", c.name, c.passed, c.detail.replace('"', "\"\""));
        }
        out
    }

    pub fn markdown(&self) -> String {
        let r = &self.report;
        let mut out = String::new();
        let title = r.scenario.as_deref().unwrap_or(&r.command);
        let _ = writeln!(out, "# {title}\n");
        let _ = writeln!(out, "- command: `{}`", r.command);
        let _ = writeln!(out, "- seed: {}", r.seed);
        let verdict = if self.passed() { "all checks passed" } else { "some checks FAILED" };
        let _ = writeln!(out, "- status: {verdict}\n");
        if !r.checks.is_empty() {
            out.push_str("| check | result | origin | detail |\n|---|---|---|---|\n");
            for c in &r.checks {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} |",
                    c.name,
                    if c.passed { "pass" } else { "FAIL" },
                    c.origin.as_deref().unwrap_or("invariant"),
                    c.detail.replace('|', "\\|")
                );
            }
        }
        out
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.json())?;
        fs::write(dir.join("report.csv"), self.csv())?;
        fs::write(dir.join("report.md"), self.markdown())
    }
}
