//! The three experiments: correlation sweep, CHSH, bound audit.

use serde::{Deserialize, Serialize};

use crate::bell::{verdict, CorrelationQuartet, InequalityReport};
use crate::bounds::{check_simulated_gamma, BoundReport};
use crate::coincidence::CoincidenceStats;
use crate::error::{Error, Result};
use crate::model::{CoincidenceMode, ModelParams};
use crate::simulate::Simulator;
use crate::stream::StreamKey;
use crate::vector::UnitVector3;

use super::config::ExperimentConfig;

// Stream families, so that the three experiments never share draws.
const JOB_SWEEP: u64 = 1 << 40;
const JOB_CHSH: u64 = 2 << 40;
const JOB_BOUNDS: u64 = 3 << 40;

/// One row of the correlation sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha_deg: f64,
    pub stats: CoincidenceStats,
    /// `-cos α`.
    pub singlet_reference: f64,
    /// `-(1 - 2α/π)`, the correlation of the unfiltered ensemble.
    pub triangle_reference: f64,
}

impl SweepRow {
    /// `E - (-cos α)`, when any event survived.
    pub fn cosine_deviation(&self) -> Option<f64> {
        self.stats.e_conditional.map(|e| e - self.singlet_reference)
    }

    pub fn triangle_deviation(&self) -> Option<f64> {
        self.stats.e_conditional.map(|e| e - self.triangle_reference)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Rows with no coincidences.
    pub fn flagged(&self) -> Vec<f64> {
        self.rows.iter().filter(|r| !r.stats.is_defined()).map(|r| r.alpha_deg).collect()
    }

    /// Largest `|E + cos α|` and the row it occurs in; `None` if any row is
    /// undefined.
    pub fn max_cosine_deviation(&self) -> Option<(f64, &SweepRow)> {
        let mut best: Option<(f64, &SweepRow)> = None;
        for row in &self.rows {
            let d = row.cosine_deviation()?.abs();
            if best.is_none_or(|(b, _)| d > b) {
                best = Some((d, row));
            }
        }
        best
    }
}

/// Unsigned angle between in-plane settings at `0` and `alpha_deg`.
pub fn unsigned_angle(alpha_deg: f64) -> f64 {
    UnitVector3::in_plane_deg(0.0).angle_to(&UnitVector3::in_plane_deg(alpha_deg))
}

pub fn run_correlation_sweep(config: &ExperimentConfig, sim: &Simulator) -> Result<SweepTable> {
    config.validate()?;
    let params = config.model_params()?;
    sweep_with(config, &params, sim)
}

/// Sweep with explicit model parameters (used for the unfiltered and
/// halved-resolution variants).
pub fn sweep_with(config: &ExperimentConfig, params: &ModelParams, sim: &Simulator) -> Result<SweepTable> {
    let key = StreamKey::new(config.seed);
    let a1 = UnitVector3::in_plane_deg(0.0);
    let rows = config
        .alpha_grid_deg
        .iter()
        .enumerate()
        .map(|(i, &deg)| {
            let a2 = UnitVector3::in_plane_deg(deg);
            let stats = sim.run(key.for_job(JOB_SWEEP + i as u64), a1, a2, params, config.n_events)?;
            let alpha = unsigned_angle(deg);
            Ok(SweepRow {
                alpha_deg: deg,
                stats,
                singlet_reference: -alpha.cos(),
                triangle_reference: -(1.0 - 2.0 * alpha / std::f64::consts::PI),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { rows })
}

/// Statistics for one of the four CHSH setting pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairResult {
    pub label: String,
    pub setting1_deg: f64,
    pub setting2_deg: f64,
    pub stats: CoincidenceStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChshOutcome {
    pub pairs: Vec<PairResult>,
    pub quartet: CorrelationQuartet,
    pub report: InequalityReport,
}

pub fn run_chsh_experiment(config: &ExperimentConfig, sim: &Simulator) -> Result<ChshOutcome> {
    config.validate()?;
    let params = config.model_params()?;
    let [a, b, c, d] = config.settings_deg;
    let combos = [("a,c", a, c), ("a,d", a, d), ("b,c", b, c), ("b,d", b, d)];
    let key = StreamKey::new(config.seed);

    let mut pairs = Vec::with_capacity(4);
    for (i, (label, s1, s2)) in combos.into_iter().enumerate() {
        let stats = sim.run(
            key.for_job(JOB_CHSH + i as u64),
            UnitVector3::in_plane_deg(s1),
            UnitVector3::in_plane_deg(s2),
            &params,
            config.n_events,
        )?;
        if !stats.is_defined() {
            return Err(Error::EmptyEnsemble(Some(format!("({label}) = ({s1}°, {s2}°)"))));
        }
        pairs.push(PairResult { label: label.to_string(), setting1_deg: s1, setting2_deg: s2, stats });
    }

    let e: Vec<f64> = pairs.iter().map(|p| p.stats.e_conditional.unwrap_or(0.0)).collect();
    let g: Vec<f64> = pairs.iter().map(|p| p.stats.gamma_hat).collect();
    let se: Vec<f64> = pairs.iter().map(|p| p.stats.stderr_e.unwrap_or(0.0)).collect();
    let quartet = CorrelationQuartet::new([e[0], e[1], e[2], e[3]], [g[0], g[1], g[2], g[3]])?
        .with_stderr([se[0], se[1], se[2], se[3]]);
    let report = verdict(&quartet)?;
    Ok(ChshOutcome { pairs, quartet, report })
}

pub fn run_bound_audit(config: &ExperimentConfig, sim: &Simulator) -> Result<Vec<BoundReport>> {
    config.validate()?;
    if config.coincidence_mode != CoincidenceMode::SameBin {
        return Err(Error::ModeMismatch(
            "the bound audit needs same-bin tagging with W = tau".into(),
        ));
    }
    let key = StreamKey::new(config.seed);
    let a1 = UnitVector3::in_plane_deg(0.0);
    let mut reports = Vec::new();
    for (ti, &tau) in config.tau_grid.iter().enumerate() {
        let params = ModelParams::same_bin(tau)?.with_d_exponent(config.d_exponent)?;
        for (ai, &deg) in config.bound_alpha_grid_deg.iter().enumerate() {
            let job = JOB_BOUNDS + (ti as u64) * 1024 + ai as u64;
            let stats = sim.run(key.for_job(job), a1, UnitVector3::in_plane_deg(deg), &params, config.n_events)?;
            reports.push(check_simulated_gamma(&stats, unsigned_angle(deg), tau)?);
        }
    }
    Ok(reports)
}
