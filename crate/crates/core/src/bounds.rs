//! Upper bounds on the coincidence probability γ for `W = tau`.
//!
//! Each closed form is paired with a direct numerical evaluation of the
//! integral it is stated to equal. Simulated γ̂ values are only ever checked
//! against the closed forms one-sidedly.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::coincidence::CoincidenceStats;
use crate::error::{Error, Result};
use crate::model::CoincidenceMode;
use crate::quadrature::{integrate, Estimate};

/// Relative error target of the φ-integral.
pub const UNEQUAL_QUADRATURE_REL_TOL: f64 = 1e-10;
/// Relative error target of the double integral.
pub const EQUAL_QUADRATURE_REL_TOL: f64 = 1e-9;
/// Simulated γ̂ is allowed `SIGMA_MARGIN` standard errors above a bound.
pub const SIGMA_MARGIN: f64 = 4.0;

/// Angles closer than this to zero use the equal-settings bound.
const EQUAL_SETTINGS_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// Unsigned angle between the settings, radians.
    pub alpha: f64,
    pub tau: f64,
    pub closed_form: f64,
    /// Numerical value of the integral behind `closed_form`; `None` where it
    /// diverges (`alpha = π`).
    pub quadrature: Option<f64>,
    pub quadrature_abs_error: Option<f64>,
    pub simulated_gamma: Option<f64>,
    pub simulated_stderr: Option<f64>,
    pub n_events: Option<u64>,
    /// `simulated_gamma + SIGMA_MARGIN * stderr <= closed_form`; vacuously
    /// true without a simulation.
    pub satisfied: bool,
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::InvalidParameter(format!("tau must lie in (0, 1], got {tau}")));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=PI).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be an unsigned angle in [0, π], got {alpha}"
        )));
    }
    Ok(())
}

/// `8 tau cot(alpha/2)` for settings `alpha` apart.
pub fn unequal_settings_bound(alpha: f64, tau: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if tau <= 0.0 || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
    }
    if alpha == 0.0 {
        return Err(Error::UseEqualSettingsBound);
    }
    if alpha == PI {
        return Ok(0.0);
    }
    let half = 0.5 * alpha;
    Ok(8.0 * tau * half.cos() / half.sin())
}

/// The φ-integrand `min(sin²φ, sin²(φ-α)) / (sin²φ sin²(φ-α))`, evaluated
/// as `1 / max(sin²φ, sin²(φ-α))` so the zeros of either factor are harmless.
fn unequal_integrand(alpha: f64) -> impl Fn(f64) -> f64 {
    move |phi: f64| {
        let s1 = phi.sin();
        let s2 = (phi - alpha).sin();
        1.0 / (s1 * s1).max(s2 * s2)
    }
}

/// `2 tau ∫ integrand dφ` over one period starting at `start`, split at the
/// kinks `α/2 + kπ/2`.
fn unequal_over_period(alpha: f64, tau: f64, start: f64) -> Result<Estimate> {
    check_alpha(alpha)?;
    check_tau(tau)?;
    if alpha <= 0.0 || alpha >= PI {
        return Err(Error::Divergent(alpha));
    }
    let end = start + TAU;
    let mut points = vec![start, end];
    for k in -8..=8 {
        let kink = 0.5 * alpha + f64::from(k) * FRAC_PI_2;
        if kink > start && kink < end {
            points.push(kink);
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    let f = unequal_integrand(alpha);
    let est = integrate(&f, &points, 0.0, UNEQUAL_QUADRATURE_REL_TOL)?;
    Ok(Estimate { value: 2.0 * tau * est.value, abs_error: 2.0 * tau * est.abs_error })
}

/// Numerical value of
/// `2 tau ∫₀^{2π} min(sin²φ, sin²(φ-α)) / (sin²φ sin²(φ-α)) dφ`.
///
/// The integrand has poles at `α = 0` and `α = π`; both are reported as
/// [`Error::Divergent`].
pub fn unequal_settings_quadrature(alpha: f64, tau: f64) -> Result<f64> {
    Ok(unequal_over_period(alpha, tau, 0.0)?.value)
}

/// Same integral taken over `[start, start + 2π]`.
pub fn unequal_settings_quadrature_from(alpha: f64, tau: f64, start: f64) -> Result<f64> {
    Ok(unequal_over_period(alpha, tau, start)?.value)
}

/// `4π (τ^{2/3} √(1-τ^{2/3}) + τ^{2/3} / (1 + √(1-τ^{2/3})))`, the exact
/// value of the equal-settings double integral.
pub fn equal_settings_bound(tau: f64) -> Result<f64> {
    check_tau(tau)?;
    let t23 = tau.powf(2.0 / 3.0);
    let c = (1.0 - t23).max(0.0).sqrt();
    Ok(4.0 * PI * (t23 * c + t23 / (1.0 + c)))
}

/// `6π τ^{2/3}`, the small-τ form of [`equal_settings_bound`].
pub fn approx_equal_settings(tau: f64) -> Result<f64> {
    check_tau(tau)?;
    Ok(6.0 * PI * tau.powf(2.0 / 3.0))
}

fn equal_settings_estimate(tau: f64) -> Result<Estimate> {
    check_tau(tau)?;
    // Saturation where cos²φ sin²θ >= c².
    let c = (1.0 - tau.powf(2.0 / 3.0)).max(0.0).sqrt();
    let integrand = move |theta: f64, phi: f64| {
        let (st, cp) = (theta.sin(), phi.cos());
        let base = 1.0 - cp * cp * st * st;
        let weight = if base <= 0.0 { 1.0 } else { (tau / (base * base.sqrt())).min(1.0) };
        weight * st
    };

    let inner = |phi: f64| -> Result<Estimate> {
        let acp = phi.cos().abs();
        let mut points = vec![0.0, FRAC_PI_2, PI];
        if acp > c {
            let theta_star = (c / acp).min(1.0).asin();
            points.extend([theta_star, PI - theta_star]);
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        integrate(&|theta| integrand(theta, phi), &points, 1e-15, 1e-12)
    };

    // Outer integrand; a failed inner integral poisons the sum with NaN and
    // surfaces as a tolerance error from the outer call.
    let outer = |phi: f64| inner(phi).map(|e| e.value).unwrap_or(f64::NAN);

    let phi0 = c.min(1.0).acos();
    let mut points = vec![0.0, FRAC_PI_2, PI, 1.5 * PI, TAU];
    if c > 0.0 {
        points.extend([phi0, PI - phi0, PI + phi0, TAU - phi0]);
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    integrate(&outer, &points, 0.0, EQUAL_QUADRATURE_REL_TOL)
}

/// Numerical value of
/// `∫₀^π ∫₀^{2π} min(τ / (1 - cos²φ sin²θ)^{3/2}, 1) sinθ dφ dθ`,
/// with both integration axes split along the saturation boundary.
pub fn equal_settings_quadrature(tau: f64) -> Result<f64> {
    Ok(equal_settings_estimate(tau)?.value)
}

/// The applicable bound for settings `alpha` apart, with its quadrature
/// counterpart, and no simulated value.
pub fn analytic_report(alpha: f64, tau: f64) -> Result<BoundReport> {
    check_alpha(alpha)?;
    check_tau(tau)?;
    let (closed_form, quad) = if alpha < EQUAL_SETTINGS_EPS {
        (equal_settings_bound(tau)?, Some(equal_settings_estimate(tau)?))
    } else {
        let quad = match unequal_over_period(alpha, tau, 0.0) {
            Ok(est) => Some(est),
            Err(Error::Divergent(_)) => None,
            Err(e) => return Err(e),
        };
        (unequal_settings_bound(alpha, tau)?, quad)
    };
    Ok(BoundReport {
        alpha,
        tau,
        closed_form,
        quadrature: quad.map(|e| e.value),
        quadrature_abs_error: quad.map(|e| e.abs_error),
        simulated_gamma: None,
        simulated_stderr: None,
        n_events: None,
        satisfied: true,
    })
}

/// Checks a same-bin, `W = tau` simulation at angle `alpha` against the
/// applicable bound.
pub fn check_simulated_gamma(stats: &CoincidenceStats, alpha: f64, tau: f64) -> Result<BoundReport> {
    if stats.mode != CoincidenceMode::SameBin {
        return Err(Error::ModeMismatch(format!(
            "bounds assume same-bin tagging with W = tau, got {} statistics",
            stats.mode
        )));
    }
    if (stats.tau - tau).abs() > 1e-12 * tau {
        return Err(Error::ModeMismatch(format!(
            "statistics were taken at tau = {}, not {tau}",
            stats.tau
        )));
    }
    let mut report = analytic_report(alpha, tau)?;
    let upper = stats.gamma_hat + SIGMA_MARGIN * stats.stderr_gamma;
    report.simulated_gamma = Some(stats.gamma_hat);
    report.simulated_stderr = Some(stats.stderr_gamma);
    report.n_events = Some(stats.n_total);
    report.satisfied = upper <= report.closed_form;
    Ok(report)
}
