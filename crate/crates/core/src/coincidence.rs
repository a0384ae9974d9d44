//! Time-window post-selection and the statistics of the surviving events.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{bin_index, CoincidenceMode, EventPair, ModelParams};

/// Inclusive window test in continuous mode, same resolution bin in
/// same-bin mode.
#[inline]
pub fn is_coincident(t1: f64, t2: f64, params: &ModelParams) -> bool {
    match params.mode {
        CoincidenceMode::Continuous => (t1 - t2).abs() <= params.window,
        CoincidenceMode::SameBin => bin_index(t1, params.tau) == bin_index(t2, params.tau),
    }
}

/// Integer event counts. Merging is associative and commutative, so any
/// partition of an event range yields the same totals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoincidenceTally {
    pub n_total: u64,
    pub n_coincident: u64,
    pub sum_xy: i64,
}

impl CoincidenceTally {
    #[inline]
    pub fn record(&mut self, pair: &EventPair, params: &ModelParams) {
        self.n_total += 1;
        if is_coincident(pair.t1, pair.t2, params) {
            self.n_coincident += 1;
            self.sum_xy += pair.product();
        }
    }

    pub fn merge(self, other: CoincidenceTally) -> CoincidenceTally {
        CoincidenceTally {
            n_total: self.n_total + other.n_total,
            n_coincident: self.n_coincident + other.n_coincident,
            sum_xy: self.sum_xy + other.sum_xy,
        }
    }
}

/// Coincidence statistics for one setting pair.
///
/// `e_conditional` and `stderr_e` are `None` when no event survived the
/// window cut.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceStats {
    pub mode: CoincidenceMode,
    pub tau: f64,
    pub window: f64,
    pub n_total: u64,
    pub n_coincident: u64,
    pub sum_xy: i64,
    pub gamma_hat: f64,
    pub e_conditional: Option<f64>,
    pub stderr_gamma: f64,
    pub stderr_e: Option<f64>,
}

impl CoincidenceStats {
    pub fn from_tally(tally: CoincidenceTally, params: &ModelParams) -> Result<Self> {
        if tally.n_total == 0 {
            return Err(Error::NoEvents);
        }
        let n = tally.n_total as f64;
        let gamma_hat = tally.n_coincident as f64 / n;
        let stderr_gamma = (gamma_hat * (1.0 - gamma_hat) / n).sqrt();
        let (e_conditional, stderr_e) = if tally.n_coincident == 0 {
            (None, None)
        } else {
            let nc = tally.n_coincident as f64;
            let e = tally.sum_xy as f64 / nc;
            (Some(e), Some(((1.0 - e * e).max(0.0) / nc).sqrt()))
        };
        Ok(CoincidenceStats {
            mode: params.mode,
            tau: params.tau,
            window: params.window,
            n_total: tally.n_total,
            n_coincident: tally.n_coincident,
            sum_xy: tally.sum_xy,
            gamma_hat,
            e_conditional,
            stderr_gamma,
            stderr_e,
        })
    }

    pub fn tally(&self) -> CoincidenceTally {
        CoincidenceTally {
            n_total: self.n_total,
            n_coincident: self.n_coincident,
            sum_xy: self.sum_xy,
        }
    }

    pub fn is_defined(&self) -> bool {
        self.e_conditional.is_some()
    }
}

/// Post-selects a stream of events and summarizes the survivors.
pub fn accumulate<I>(pairs: I, params: &ModelParams) -> Result<CoincidenceStats>
where
    I: IntoIterator<Item = EventPair>,
{
    let mut tally = CoincidenceTally::default();
    for pair in pairs {
        tally.record(&pair, params);
    }
    CoincidenceStats::from_tally(tally, params)
}

fn check_durations(t1: f64, t2: f64, width: f64) -> Result<()> {
    if !(t1 >= 0.0 && t2 >= 0.0 && width >= 0.0) || !(t1.is_finite() && t2.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "durations must be finite and nonnegative, got T1 = {t1}, T2 = {t2}, width = {width}"
        )));
    }
    Ok(())
}

/// Area of `{(x, y) ∈ [0, a] × [0, b] : y - x > w}` for `w >= 0`.
fn corner_area(a: f64, b: f64, w: f64) -> f64 {
    let m = a.min((b - w).max(0.0));
    (b - w) * m - 0.5 * m * m
}

/// Exact `P(|u1 - u2| <= w)` for independent `u1 ~ U[0, t1]`,
/// `u2 ~ U[0, t2]`. A zero duration pins that tag at 0.
pub fn coincidence_probability_exact(t1: f64, t2: f64, w: f64) -> Result<f64> {
    check_durations(t1, t2, w)?;
    let p = match (t1 > 0.0, t2 > 0.0) {
        (false, false) => 1.0,
        (false, true) => w / t2,
        (true, false) => w / t1,
        (true, true) => {
            let outside = corner_area(t1, t2, w) + corner_area(t2, t1, w);
            1.0 - outside / (t1 * t2)
        }
    };
    Ok(p.clamp(0.0, 1.0))
}

/// Exact probability that two independent uniform tags on `[0, t1)` and
/// `[0, t2)` share a resolution bin of width `tau`.
pub fn same_bin_probability_exact(t1: f64, t2: f64, tau: f64) -> Result<f64> {
    check_durations(t1, t2, tau)?;
    if tau <= 0.0 {
        return Err(Error::InvalidParameter("tau must be positive".into()));
    }
    let (short, long) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
    if long == 0.0 {
        return Ok(1.0);
    }
    if short == 0.0 {
        return Ok((tau / long).min(1.0));
    }
    // Bins below `full` are covered entirely by both intervals.
    let full = (short / tau).floor();
    let start = full * tau;
    let len_short = (short - start).max(0.0);
    let len_long = (long - start).clamp(0.0, tau);
    let overlap = full * tau * tau + len_short * len_long;
    Ok((overlap / (short * long)).clamp(0.0, 1.0))
}

/// The per-event density bound `tau min(T1, T2) / (T1 T2)`, capped at 1.
pub fn same_bin_density_bound(t1: f64, t2: f64, tau: f64) -> f64 {
    let mx = t1.max(t2);
    if mx <= 0.0 {
        1.0
    } else {
        (tau / mx).min(1.0)
    }
}
