use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::BoundReport;
use crate::error::{Error, Result};

use super::config::ExperimentConfig;
use super::experiments::{ChshOutcome, SweepTable};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MANIFEST_FILE: &str = "manifest.json";

/// When and how a run was executed. Excluded from the canonical form,
/// since none of it affects the statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub timestamp: String,
    pub wall_clock_secs: f64,
    pub workers: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunResults {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chsh: Option<ChshOutcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<BoundReport>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact_version: String,
    pub command: String,
    pub config: ExperimentConfig,
    pub results: RunResults,
    pub run_info: RunInfo,
}

#[derive(Serialize)]
struct CanonicalView<'a> {
    artifact_version: &'a str,
    command: &'a str,
    config: &'a ExperimentConfig,
    results: &'a RunResults,
}

impl RunManifest {
    pub fn new(command: &str, config: &ExperimentConfig, results: RunResults, run_info: RunInfo) -> Self {
        RunManifest {
            artifact_version: ARTIFACT_VERSION.to_string(),
            command: command.to_string(),
            config: config.snapshot(),
            results,
            run_info,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Io(format!("malformed manifest: {e}")))
    }

    /// Everything except [`RunInfo`]. Two runs with the same seed and
    /// config produce byte-identical canonical forms.
    pub fn canonical_json(&self) -> Result<String> {
        let view = CanonicalView {
            artifact_version: &self.artifact_version,
            command: &self.command,
            config: &self.config,
            results: &self.results,
        };
        serde_json::to_string_pretty(&view).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(MANIFEST_FILE);
        fs::write(&path, self.to_json()?)?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

pub fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}
