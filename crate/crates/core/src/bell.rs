//! CHSH and the coincidence-corrected CHSH bound `6/γ - 4`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The γ above which a CHSH value of `2√2` violates the corrected bound:
/// `3 - 3/√2`.
pub const GAMMA_ZERO: f64 = 3.0 - 3.0 / std::f64::consts::SQRT_2;

/// Conditional correlations and coincidence probabilities for the four
/// setting pairs `(a,c)`, `(a,d)`, `(b,c)`, `(b,d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationQuartet {
    pub e_ac: f64,
    pub e_ad: f64,
    pub e_bc: f64,
    pub e_bd: f64,
    pub gamma_ac: f64,
    pub gamma_ad: f64,
    pub gamma_bc: f64,
    pub gamma_bd: f64,
    /// Standard errors of the four correlations, same order.
    #[serde(default)]
    pub e_stderr: Option<[f64; 4]>,
}

impl CorrelationQuartet {
    /// Correlations and γ's in the order `ac, ad, bc, bd`.
    pub fn new(e: [f64; 4], gamma: [f64; 4]) -> Result<Self> {
        let q = CorrelationQuartet {
            e_ac: e[0],
            e_ad: e[1],
            e_bc: e[2],
            e_bd: e[3],
            gamma_ac: gamma[0],
            gamma_ad: gamma[1],
            gamma_bc: gamma[2],
            gamma_bd: gamma[3],
            e_stderr: None,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn with_stderr(mut self, se: [f64; 4]) -> Self {
        self.e_stderr = Some(se);
        self
    }

    pub fn correlations(&self) -> [f64; 4] {
        [self.e_ac, self.e_ad, self.e_bc, self.e_bd]
    }

    pub fn gammas(&self) -> [f64; 4] {
        [self.gamma_ac, self.gamma_ad, self.gamma_bc, self.gamma_bd]
    }

    pub fn validate(&self) -> Result<()> {
        for e in self.correlations() {
            if !(-1.0..=1.0).contains(&e) {
                return Err(Error::InvalidParameter(format!("correlation {e} outside [-1, 1]")));
            }
        }
        for g in self.gammas() {
            if !(0.0..=1.0).contains(&g) {
                return Err(Error::InvalidParameter(format!(
                    "coincidence probability {g} outside (0, 1]"
                )));
            }
            if g == 0.0 {
                return Err(Error::EmptyEnsemble(None));
            }
        }
        Ok(())
    }
}

/// Verdict on both the uncorrected and the corrected inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub chsh_lhs: f64,
    /// Combined standard error of `chsh_lhs`, when the quartet carried one.
    pub chsh_lhs_stderr: Option<f64>,
    pub gammas: [f64; 4],
    pub gamma_min: f64,
    pub modified_bound: f64,
    pub violates_chsh: bool,
    pub violates_modified: bool,
    /// `6 / (chsh_lhs + 4)`; a value above 1 means no γ makes this
    /// left-hand side a violation.
    pub gamma_threshold_for_lhs: f64,
}

/// `|E(a,c) - E(a,d) + E(b,c) + E(b,d)|`.
pub fn chsh_lhs(q: &CorrelationQuartet) -> f64 {
    (q.e_ac - q.e_ad + q.e_bc + q.e_bd).abs()
}

/// `6/γ - 4`.
pub fn modified_bound(gamma: f64) -> Result<f64> {
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(Error::UndefinedBound(gamma));
    }
    if gamma > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "coincidence probability {gamma} exceeds 1"
        )));
    }
    Ok(6.0 / gamma - 4.0)
}

/// Inverse of [`modified_bound`]: the γ at which `6/γ - 4` equals
/// `target_lhs`.
pub fn gamma_threshold(target_lhs: f64) -> Result<f64> {
    if !target_lhs.is_finite() || target_lhs <= -4.0 {
        return Err(Error::InvalidParameter(format!(
            "target left-hand side must exceed -4, got {target_lhs}"
        )));
    }
    Ok(6.0 / (target_lhs + 4.0))
}

/// Applies both inequalities. The corrected bound uses the smallest of the
/// four γ's.
pub fn verdict(q: &CorrelationQuartet) -> Result<InequalityReport> {
    q.validate()?;
    let lhs = chsh_lhs(q);
    let gammas = q.gammas();
    let gamma_min = gammas.iter().copied().fold(f64::INFINITY, f64::min);
    let bound = modified_bound(gamma_min)?;
    Ok(InequalityReport {
        chsh_lhs: lhs,
        chsh_lhs_stderr: q.e_stderr.map(|se| se.iter().map(|s| s * s).sum::<f64>().sqrt()),
        gammas,
        gamma_min,
        modified_bound: bound,
        violates_chsh: lhs > 2.0,
        violates_modified: lhs > bound,
        gamma_threshold_for_lhs: gamma_threshold(lhs)?,
    })
}
