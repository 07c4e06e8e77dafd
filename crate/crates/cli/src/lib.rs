//! Batch front end: JSON configurations in, `report.{json,csv,md}` out.

pub mod commands;
pub mod error;
pub mod report;
pub mod scenarios;

use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::Value;

use orbitforge::chow::QuadratureSpec;

pub use commands::Settings;
pub use error::{CliError, CliResult};
pub use report::{Output, Report};

/// A scenario run described by a file.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: String,
    #[serde(default)]
    pub input: Value,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub quadrature: Option<QuadratureSpec>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

pub fn read_json(path: &Path) -> CliResult<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn load_scenario_config(path: &Path) -> CliResult<ScenarioConfig> {
    serde_json::from_value(read_json(path)?).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
