use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CoincidenceMode, ModelParams, DEFAULT_D_EXPONENT};

/// Everything that determines a run. `(seed, config)` fixes every statistic;
/// `workers` only changes how fast they are produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// CHSH settings `a, b, c, d` in degrees, all in the same plane.
    pub settings_deg: [f64; 4],
    /// Angles for the correlation sweep, degrees.
    pub alpha_grid_deg: Vec<f64>,
    /// Angles for the bound audit, degrees.
    pub bound_alpha_grid_deg: Vec<f64>,
    /// Resolutions for the bound audit (always same-bin with `W = tau`).
    pub tau_grid: Vec<f64>,
    pub tau: f64,
    pub window: f64,
    pub d_exponent: f64,
    pub coincidence_mode: CoincidenceMode,
    /// Events per setting pair.
    pub n_events: u64,
    pub seed: u64,
    /// Worker threads; `None` uses every available core.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

pub const DEFAULT_TAU: f64 = 0.00025;
pub const DEFAULT_EVENTS: u64 = 10_000_000;
pub const DEFAULT_SEED: u64 = 1;

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            settings_deg: [0.0, 90.0, 45.0, 135.0],
            alpha_grid_deg: (0..=12).map(|k| 15.0 * f64::from(k)).collect(),
            bound_alpha_grid_deg: vec![0.0, 30.0, 90.0, 150.0],
            tau_grid: vec![1e-2, 1e-3],
            tau: DEFAULT_TAU,
            window: DEFAULT_TAU,
            d_exponent: DEFAULT_D_EXPONENT,
            coincidence_mode: CoincidenceMode::SameBin,
            n_events: DEFAULT_EVENTS,
            seed: DEFAULT_SEED,
            workers: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n_events == 0 {
            return bad("n_events must be at least 1".into());
        }
        for (name, v) in [("tau", self.tau), ("window", self.window)] {
            if !(v > 0.0 && v <= 1.0) {
                return bad(format!("{name} must lie in (0, 1], got {v}"));
            }
        }
        if !(self.d_exponent > 0.0 && self.d_exponent.is_finite()) {
            return bad(format!("d_exponent must be positive, got {}", self.d_exponent));
        }
        let angles = self
            .settings_deg
            .iter()
            .chain(&self.alpha_grid_deg)
            .chain(&self.bound_alpha_grid_deg);
        if let Some(a) = angles.into_iter().find(|a| !a.is_finite()) {
            return bad(format!("angles must be finite, got {a}"));
        }
        if let Some(a) = self.bound_alpha_grid_deg.iter().find(|a| !(0.0..=180.0).contains(*a)) {
            return bad(format!("bound audit angles must lie in [0, 180] degrees, got {a}"));
        }
        if let Some(t) = self.tau_grid.iter().find(|t| !(**t > 0.0 && **t <= 1.0)) {
            return bad(format!("tau_grid entries must lie in (0, 1], got {t}"));
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        Ok(())
    }

    /// Model parameters for the sweep and CHSH runs.
    pub fn model_params(&self) -> Result<ModelParams> {
        ModelParams::new(self.tau, self.window, self.d_exponent, self.coincidence_mode)
    }

    pub fn effective_workers(&self) -> usize {
        self.workers
            .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
    }

    /// The config as recorded in a manifest: worker count stripped, since it
    /// does not affect results.
    pub fn snapshot(&self) -> ExperimentConfig {
        ExperimentConfig { workers: None, ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        assert_eq!(c.alpha_grid_deg.len(), 13);
        assert_eq!(c.alpha_grid_deg[12], 180.0);
        assert_eq!(c.model_params().unwrap().mode, CoincidenceMode::SameBin);
    }

    #[test]
    fn toml_round_trip_and_partial_files() {
        let c = ExperimentConfig { seed: 77, workers: Some(3), ..Default::default() };
        let text = c.to_toml_string().unwrap();
        assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), c);

        let partial = ExperimentConfig::from_toml_str("tau = 0.001\ncoincidence_mode = \"continuous\"\n").unwrap();
        assert_eq!(partial.tau, 0.001);
        assert_eq!(partial.coincidence_mode, CoincidenceMode::Continuous);
        assert_eq!(partial.n_events, DEFAULT_EVENTS);
    }

    #[test]
    fn invalid_configs_rejected() {
        for text in [
            "n_events = 0",
            "tau = 0.0",
            "window = 2.0",
            "d_exponent = -1.0",
            "workers = 0",
            "tau_grid = [0.0]",
            "bound_alpha_grid_deg = [190.0]",
            "no_such_field = 1",
            "coincidence_mode = \"sliding\"",
        ] {
            assert!(ExperimentConfig::from_toml_str(text).is_err(), "{text}");
        }
        let c = ExperimentConfig { alpha_grid_deg: vec![f64::NAN], ..Default::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn snapshot_drops_workers() {
        let c = ExperimentConfig { workers: Some(8), ..Default::default() };
        assert_eq!(c.snapshot().workers, None);
        assert!(!c.snapshot().to_toml_string().unwrap().contains("workers"));
    }
}
