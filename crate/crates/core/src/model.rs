//! The local hidden-variable event generator.
//!
//! Each event draws one hidden direction `S`. Station 1 sees `S`, station 2
//! sees `-S`. A station reports `sign(a·S)` and a time tag drawn uniformly
//! on `[0, T)`, where `T = t_max (1 - (a·S)²)^{d/2}` depends only on that
//! station's setting and hidden variable.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::UnitVector3;

/// How two time tags are judged coincident.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CoincidenceMode {
    /// Tags fall in the same resolution bin `floor(t / tau)`.
    #[default]
    SameBin,
    /// `|t1 - t2| <= window`.
    Continuous,
}

impl fmt::Display for CoincidenceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoincidenceMode::SameBin => "same-bin",
            CoincidenceMode::Continuous => "continuous",
        })
    }
}

impl FromStr for CoincidenceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "same-bin" | "samebin" => Ok(CoincidenceMode::SameBin),
            "continuous" => Ok(CoincidenceMode::Continuous),
            other => Err(Error::InvalidParameter(format!(
                "unknown coincidence mode '{other}' (expected same-bin or continuous)"
            ))),
        }
    }
}

/// Time is measured in units of the maximal delay, so `t_max` is always 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub tau: f64,
    pub window: f64,
    pub t_max: f64,
    pub d_exponent: f64,
    pub mode: CoincidenceMode,
}

pub const DEFAULT_D_EXPONENT: f64 = 3.0;

impl ModelParams {
    pub fn new(tau: f64, window: f64, d_exponent: f64, mode: CoincidenceMode) -> Result<Self> {
        let p = ModelParams { tau, window, t_max: 1.0, d_exponent, mode };
        p.validate()?;
        Ok(p)
    }

    /// Same-bin tagging with `W = tau`.
    pub fn same_bin(tau: f64) -> Result<Self> {
        Self::new(tau, tau, DEFAULT_D_EXPONENT, CoincidenceMode::SameBin)
    }

    /// Literal `|t1 - t2| <= window` matching; `tau` is carried along but
    /// does not enter the coincidence test.
    pub fn continuous(tau: f64, window: f64) -> Result<Self> {
        Self::new(tau, window, DEFAULT_D_EXPONENT, CoincidenceMode::Continuous)
    }

    pub fn with_d_exponent(mut self, d: f64) -> Result<Self> {
        self.d_exponent = d;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::InvalidParameter(format!("tau must lie in (0, 1], got {}", self.tau)));
        }
        if !(self.window >= 0.0 && self.window <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "window must lie in [0, 1], got {}",
                self.window
            )));
        }
        if !(self.d_exponent > 0.0 && self.d_exponent.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "d_exponent must be positive, got {}",
                self.d_exponent
            )));
        }
        if self.t_max != 1.0 {
            return Err(Error::InvalidParameter("t_max is the unit of time and must be 1".into()));
        }
        Ok(())
    }
}

/// One simulated event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventPair {
    pub x1: i8,
    pub x2: i8,
    pub t1: f64,
    pub t2: f64,
    /// Hidden direction seen by station 1; station 2 saw `-s`.
    pub s: UnitVector3,
}

impl EventPair {
    pub fn product(&self) -> i64 {
        i64::from(self.x1 * self.x2)
    }
}

/// What one station reports for one event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub outcome: i8,
    pub tag: f64,
}

/// Uniform direction on the unit sphere from exactly two draws:
/// `z` uniform on `[-1, 1)` and azimuth uniform on `[0, 2π)`.
pub fn sample_direction<R: Rng + ?Sized>(rng: &mut R) -> UnitVector3 {
    let z = 2.0 * rng.random::<f64>() - 1.0;
    let phi = TAU * rng.random::<f64>();
    let r = (1.0 - z * z).max(0.0).sqrt();
    let (sp, cp) = phi.sin_cos();
    // |(r cp, r sp, z)|² = 1 up to rounding.
    UnitVector3::new(r * cp, r * sp, z).unwrap_or(UnitVector3::Z)
}

/// `sign(setting · s)`, with the measure-zero tie sent to +1.
#[inline]
pub fn outcome(setting: &UnitVector3, s: &UnitVector3) -> i8 {
    if setting.dot(s) >= 0.0 {
        1
    } else {
        -1
    }
}

/// `t_max (1 - (setting·s)²)^{d/2}`.
#[inline]
pub fn delay_scale(setting: &UnitVector3, s: &UnitVector3, params: &ModelParams) -> f64 {
    let c = setting.dot(s);
    let base = (1.0 - c * c).clamp(0.0, 1.0);
    let scaled = if params.d_exponent == 3.0 {
        base * base.sqrt()
    } else if params.d_exponent == 2.0 {
        base
    } else {
        base.powf(0.5 * params.d_exponent)
    };
    params.t_max * scaled
}

/// Uniform tag on `[0, t_scale)`; always consumes one draw, so `t_scale = 0`
/// yields 0 without disturbing the stream alignment.
#[inline]
pub fn sample_time_tag<R: Rng + ?Sized>(rng: &mut R, t_scale: f64) -> f64 {
    let u: f64 = rng.random();
    u * t_scale
}

/// Resolution bin of a time tag.
#[inline]
pub fn bin_index(t: f64, tau: f64) -> i64 {
    (t / tau).floor() as i64
}

/// Station response: depends on nothing but the local setting, the local
/// hidden variable and the station's own draw.
#[inline]
pub fn detect<R: Rng + ?Sized>(
    rng: &mut R,
    setting: &UnitVector3,
    hidden: &UnitVector3,
    params: &ModelParams,
) -> Detection {
    let outcome = outcome(setting, hidden);
    let tag = sample_time_tag(rng, delay_scale(setting, hidden, params));
    Detection { outcome, tag }
}

/// One event: draws `S`, then station 1's tag, then station 2's tag.
#[inline]
pub fn generate_pair<R: Rng + ?Sized>(
    rng: &mut R,
    a1: &UnitVector3,
    a2: &UnitVector3,
    params: &ModelParams,
) -> EventPair {
    let s = sample_direction(rng);
    let d1 = detect(rng, a1, &s, params);
    let d2 = detect(rng, a2, &-s, params);
    EventPair { x1: d1.outcome, x2: d2.outcome, t1: d1.tag, t2: d2.tag, s }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::same_bin(0.0).is_err());
        assert!(ModelParams::same_bin(1.5).is_err());
        assert!(ModelParams::same_bin(1.0).is_ok());
        assert!(ModelParams::new(0.1, -0.1, 3.0, CoincidenceMode::Continuous).is_err());
        assert!(ModelParams::new(0.1, 0.1, 0.0, CoincidenceMode::Continuous).is_err());
        assert!(ModelParams::new(0.1, 0.0, 3.0, CoincidenceMode::Continuous).is_ok());
    }

    #[test]
    fn mode_parses() {
        assert_eq!("same-bin".parse::<CoincidenceMode>().unwrap(), CoincidenceMode::SameBin);
        assert_eq!("Continuous".parse::<CoincidenceMode>().unwrap(), CoincidenceMode::Continuous);
        assert!("sliding".parse::<CoincidenceMode>().is_err());
    }

    #[test]
    fn direction_moments() {
        let mut r = rng(11);
        let n = 1_000_000;
        let (mut sz, mut sz2) = (0.0, 0.0);
        for _ in 0..n {
            let v = sample_direction(&mut r);
            assert!((v.norm_squared() - 1.0).abs() <= 1e-12);
            sz += v.z();
            sz2 += v.z() * v.z();
        }
        assert_abs_diff_eq!(sz / n as f64, 0.0, epsilon = 0.003);
        assert_abs_diff_eq!(sz2 / n as f64, 1.0 / 3.0, epsilon = 0.002);
    }

    #[test]
    fn azimuth_is_uniform_ks() {
        let mut r = rng(12);
        let n = 1_000_000;
        let mut phis: Vec<f64> = (0..n)
            .map(|_| {
                let v = sample_direction(&mut r);
                v.y().atan2(v.x())
            })
            .collect();
        phis.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // KS distance against the uniform law on [-π, π).
        let mut d: f64 = 0.0;
        for (i, phi) in phis.iter().enumerate() {
            let cdf = (phi + PI) / (2.0 * PI);
            let lo = i as f64 / n as f64;
            let hi = (i + 1) as f64 / n as f64;
            d = d.max((cdf - lo).abs()).max((hi - cdf).abs());
        }
        assert!(d < 0.002, "KS distance {d}");
    }

    #[test]
    fn outcome_signs() {
        let s = UnitVector3::normalize(0.3, -0.2, 0.9).unwrap();
        assert_eq!(outcome(&s, &s), 1);
        assert_eq!(outcome(&-s, &s), -1);
        // tie-break
        assert_eq!(outcome(&UnitVector3::X, &UnitVector3::Y), 1);
    }

    #[test]
    fn unconditional_product_follows_triangle_law() {
        // brute-force sphere average of sign(a·s) sign(-b·s)
        let mut r = rng(13);
        let n = 1_000_000;
        for deg in [0.0, 45.0, 90.0, 135.0] {
            let a = UnitVector3::in_plane_deg(0.0);
            let b = UnitVector3::in_plane_deg(deg);
            let mut sum = 0i64;
            for _ in 0..n {
                let s = sample_direction(&mut r);
                sum += i64::from(outcome(&a, &s) * outcome(&b, &-s));
            }
            let alpha = f64::to_radians(deg);
            assert_abs_diff_eq!(sum as f64 / n as f64, -(1.0 - 2.0 * alpha / PI), epsilon = 0.003);
        }
    }

    #[test]
    fn delay_scale_values() {
        let p = ModelParams::same_bin(0.01).unwrap();
        assert_abs_diff_eq!(delay_scale(&UnitVector3::X, &UnitVector3::Y, &p), 1.0);
        assert_abs_diff_eq!(delay_scale(&UnitVector3::X, &UnitVector3::X, &p), 0.0);
        let s = UnitVector3::in_plane(PI / 3.0); // cos = 0.5
        // 0.75^{3/2} = 3√3/8
        assert_abs_diff_eq!(delay_scale(&UnitVector3::X, &s, &p), 3.0 * 3f64.sqrt() / 8.0, epsilon = 1e-15);
        assert_abs_diff_eq!(delay_scale(&UnitVector3::X, &s, &p), 0.649_519_052_838_329, epsilon = 1e-15);
        // general-d path agrees with the specialized ones
        let p25 = p.with_d_exponent(2.5).unwrap();
        assert_abs_diff_eq!(delay_scale(&UnitVector3::X, &s, &p25), 0.75f64.powf(1.25), epsilon = 1e-15);
        let p2 = p.with_d_exponent(2.0).unwrap();
        assert_abs_diff_eq!(delay_scale(&UnitVector3::X, &s, &p2), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn time_tag_support_and_mean() {
        let mut r = rng(14);
        assert_eq!(sample_time_tag(&mut r, 0.0), 0.0);
        let n = 1_000_000;
        let mean = (0..n).map(|_| sample_time_tag(&mut r, 1.0)).sum::<f64>() / n as f64;
        assert_abs_diff_eq!(mean, 0.5, epsilon = 0.002);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for _ in 0..n {
            let t = sample_time_tag(&mut r, 0.4);
            lo = lo.min(t);
            hi = hi.max(t);
        }
        assert!(lo >= 0.0 && hi < 0.4);
    }

    #[test]
    fn equal_and_opposite_settings() {
        let p = ModelParams::same_bin(0.01).unwrap();
        let mut r = rng(15);
        let a = UnitVector3::normalize(1.0, 2.0, -0.5).unwrap();
        for _ in 0..10_000 {
            assert_eq!(generate_pair(&mut r, &a, &a, &p).product(), -1);
            assert_eq!(generate_pair(&mut r, &a, &-a, &p).product(), 1);
        }
    }

    #[test]
    fn orthogonal_settings_uncorrelated() {
        let p = ModelParams::same_bin(0.01).unwrap();
        let mut r = rng(16);
        let n = 1_000_000;
        let sum: i64 = (0..n)
            .map(|_| generate_pair(&mut r, &UnitVector3::X, &UnitVector3::Y, &p).product())
            .sum();
        assert_abs_diff_eq!(sum as f64 / n as f64, 0.0, epsilon = 0.003);
    }

    #[test]
    fn locality_audit() {
        let p = ModelParams::same_bin(0.001).unwrap();
        let mut settings = rng(17);
        for trial in 0..10_000u64 {
            let a1 = sample_direction(&mut settings);
            let a2 = sample_direction(&mut settings);
            let a2_alt = sample_direction(&mut settings);
            let a1_alt = sample_direction(&mut settings);
            let e = generate_pair(&mut rng(trial), &a1, &a2, &p);
            let e_b = generate_pair(&mut rng(trial), &a1, &a2_alt, &p);
            let e_a = generate_pair(&mut rng(trial), &a1_alt, &a2, &p);
            assert_eq!((e.x1, e.t1.to_bits()), (e_b.x1, e_b.t1.to_bits()));
            assert_eq!((e.x2, e.t2.to_bits()), (e_a.x2, e_a.t2.to_bits()));
        }
    }

    #[test]
    fn tags_within_delay_scale() {
        let p = ModelParams::same_bin(0.001).unwrap();
        let mut r = rng(18);
        let a1 = UnitVector3::in_plane_deg(0.0);
        let a2 = UnitVector3::in_plane_deg(60.0);
        for _ in 0..100_000 {
            let e = generate_pair(&mut r, &a1, &a2, &p);
            let t1 = delay_scale(&a1, &e.s, &p);
            let t2 = delay_scale(&a2, &-e.s, &p);
            assert!(e.t1 >= 0.0 && e.t1 <= t1 && t1 <= 1.0);
            assert!(e.t2 >= 0.0 && e.t2 <= t2 && t2 <= 1.0);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn unit() -> impl Strategy<Value = UnitVector3> {
            (0.0..PI, 0.0..2.0 * PI).prop_map(|(t, p)| UnitVector3::from_spherical(t, p))
        }

        proptest! {
            #[test]
            fn delay_scale_symmetric(a in unit(), s in unit(), d in 0.5f64..5.0) {
                let p = ModelParams::same_bin(0.01).unwrap().with_d_exponent(d).unwrap();
                let base = delay_scale(&a, &s, &p);
                prop_assert!((0.0..=1.0).contains(&base));
                prop_assert_eq!(base, delay_scale(&a, &-s, &p));
                prop_assert_eq!(base, delay_scale(&-a, &s, &p));
            }
        }
    }
}
