//! Adaptive Gauss–Kronrod (7/15) integration over a list of breakpoints.
//!
//! Only what the two coincidence-probability integrals need. Subintervals
//! are refined largest-error-first and summed left to right, so the result
//! is bit-stable for a given integrand.

#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const MAX_INTERVALS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Estimate {
    pub value: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut res_abs = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let abs_half = half.abs();
    let value = kronrod * half;
    let res_abs = res_abs * abs_half;
    let res_asc = res_asc * abs_half;

    // QUADPACK's error rescaling
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment { a, b, value, error: err }
}

/// Integrates `f` across consecutive `breakpoints` (sorted, at least two),
/// stopping once the summed error estimate is below
/// `max(abs_tol, rel_tol * |value|)`.
pub(crate) fn integrate<F: Fn(f64) -> f64>(
    f: &F,
    breakpoints: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Estimate> {
    debug_assert!(breakpoints.len() >= 2);
    let mut segments: Vec<Segment> = breakpoints
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gk15(f, w[0], w[1]))
        .collect();
    loop {
        let (value, error) = totals(&segments);
        if !value.is_finite() {
            return Err(Error::QuadratureTolerance { estimate: value, error });
        }
        // Requests tighter than rounding are capped at the rounding floor.
        let target = abs_tol.max(rel_tol.max(100.0 * f64::EPSILON) * value.abs());
        if error <= target {
            return Ok(Estimate { value, abs_error: error });
        }
        if segments.len() >= MAX_INTERVALS {
            return Err(Error::QuadratureTolerance { estimate: value, error });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("at least one segment");
        let s = segments[worst];
        let mid = 0.5 * (s.a + s.b);
        if !(mid > s.a && mid < s.b) {
            // interval can no longer be split in floating point
            return Err(Error::QuadratureTolerance { estimate: value, error });
        }
        segments[worst] = gk15(f, s.a, mid);
        segments.insert(worst + 1, gk15(f, mid, s.b));
    }
}

fn totals(segments: &[Segment]) -> (f64, f64) {
    segments.iter().fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error))
}
