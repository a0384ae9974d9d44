//! CSV and plain-text renderings of the experiment results.

use std::fmt::Write as _;

use serde::Serialize;

use crate::bounds::BoundReport;
use crate::error::{Error, Result};

use super::experiments::{ChshOutcome, SweepTable};

#[derive(Serialize)]
struct SweepCsvRow {
    alpha_deg: f64,
    n_events: u64,
    n_coincident: u64,
    gamma_hat: f64,
    stderr_gamma: f64,
    e_conditional: Option<f64>,
    stderr_e: Option<f64>,
    neg_cos_alpha: f64,
    triangle: f64,
    defined: bool,
}

#[derive(Serialize)]
struct PairCsvRow<'a> {
    pair: &'a str,
    setting1_deg: f64,
    setting2_deg: f64,
    n_events: u64,
    n_coincident: u64,
    gamma_hat: f64,
    stderr_gamma: f64,
    e_conditional: Option<f64>,
    stderr_e: Option<f64>,
}

#[derive(Serialize)]
struct VerdictCsvRow {
    chsh_lhs: f64,
    stderr_lhs: Option<f64>,
    gamma_min: f64,
    modified_bound: f64,
    violates_chsh: bool,
    violates_modified: bool,
    gamma_threshold_for_lhs: f64,
}

#[derive(Serialize)]
struct BoundCsvRow {
    alpha_deg: f64,
    tau: f64,
    closed_form: f64,
    quadrature: Option<f64>,
    quadrature_abs_error: Option<f64>,
    simulated_gamma: Option<f64>,
    stderr_gamma: Option<f64>,
    n_events: Option<u64>,
    satisfied: bool,
}

fn to_csv<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn sweep_csv(table: &SweepTable) -> Result<String> {
    to_csv(table.rows.iter().map(|r| SweepCsvRow {
        alpha_deg: r.alpha_deg,
        n_events: r.stats.n_total,
        n_coincident: r.stats.n_coincident,
        gamma_hat: r.stats.gamma_hat,
        stderr_gamma: r.stats.stderr_gamma,
        e_conditional: r.stats.e_conditional,
        stderr_e: r.stats.stderr_e,
        neg_cos_alpha: r.singlet_reference,
        triangle: r.triangle_reference,
        defined: r.stats.is_defined(),
    }))
}

pub fn chsh_pairs_csv(outcome: &ChshOutcome) -> Result<String> {
    to_csv(outcome.pairs.iter().map(|p| PairCsvRow {
        pair: &p.label,
        setting1_deg: p.setting1_deg,
        setting2_deg: p.setting2_deg,
        n_events: p.stats.n_total,
        n_coincident: p.stats.n_coincident,
        gamma_hat: p.stats.gamma_hat,
        stderr_gamma: p.stats.stderr_gamma,
        e_conditional: p.stats.e_conditional,
        stderr_e: p.stats.stderr_e,
    }))
}

pub fn chsh_verdict_csv(outcome: &ChshOutcome) -> Result<String> {
    let r = &outcome.report;
    to_csv([VerdictCsvRow {
        chsh_lhs: r.chsh_lhs,
        stderr_lhs: r.chsh_lhs_stderr,
        gamma_min: r.gamma_min,
        modified_bound: r.modified_bound,
        violates_chsh: r.violates_chsh,
        violates_modified: r.violates_modified,
        gamma_threshold_for_lhs: r.gamma_threshold_for_lhs,
    }])
}

pub fn bounds_csv(reports: &[BoundReport]) -> Result<String> {
    to_csv(reports.iter().map(|b| BoundCsvRow {
        alpha_deg: b.alpha.to_degrees(),
        tau: b.tau,
        closed_form: b.closed_form,
        quadrature: b.quadrature,
        quadrature_abs_error: b.quadrature_abs_error,
        simulated_gamma: b.simulated_gamma,
        stderr_gamma: b.simulated_stderr,
        n_events: b.n_events,
        satisfied: b.satisfied,
    }))
}

fn pm(value: Option<f64>, err: Option<f64>) -> String {
    match (value, err) {
        (Some(v), Some(e)) => format!("{v:+.5} ± {e:.5}"),
        (Some(v), None) => format!("{v:+.5}"),
        _ => "undefined".to_string(),
    }
}

pub fn sweep_table(table: &SweepTable) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>8}  {:>12}  {:>10}  {:>24}  {:>22}  {:>9}  {:>9}",
        "alpha", "coincident", "gamma", "(± stderr)", "E(alpha) ± stderr", "-cos", "triangle"
    );
    for r in &table.rows {
        let s = &r.stats;
        let _ = writeln!(
            out,
            "{:>8.2}  {:>12}  {:>10.3e}  {:>24}  {:>22}  {:>+9.5}  {:>+9.5}{}",
            r.alpha_deg,
            s.n_coincident,
            s.gamma_hat,
            format!("± {:.2e}", s.stderr_gamma),
            pm(s.e_conditional, s.stderr_e),
            r.singlet_reference,
            r.triangle_reference,
            if s.is_defined() { "" } else { "  [no coincidences]" }
        );
    }
    if let Some((d, row)) = table.max_cosine_deviation() {
        let _ = writeln!(out, "max |E + cos alpha| = {d:.5} at alpha = {}", row.alpha_deg);
    }
    out
}

pub fn chsh_table(outcome: &ChshOutcome) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:>5}  {:>8}  {:>8}  {:>12}  {:>22}  {:>22}", "pair", "s1", "s2", "coincident", "gamma ± stderr", "E ± stderr");
    for p in &outcome.pairs {
        let s = &p.stats;
        let _ = writeln!(
            out,
            "{:>5}  {:>8.2}  {:>8.2}  {:>12}  {:>22}  {:>22}",
            p.label,
            p.setting1_deg,
            p.setting2_deg,
            s.n_coincident,
            format!("{:.4e} ± {:.1e}", s.gamma_hat, s.stderr_gamma),
            pm(s.e_conditional, s.stderr_e)
        );
    }
    let r = &outcome.report;
    let _ = writeln!(out, "CHSH left-hand side     {}", pm(Some(r.chsh_lhs), r.chsh_lhs_stderr));
    let _ = writeln!(out, "uncorrected bound       2          violated: {}", r.violates_chsh);
    let _ = writeln!(
        out,
        "corrected bound 6/g-4   {:<10.3} violated: {}  (g_min = {:.4e})",
        r.modified_bound, r.violates_modified, r.gamma_min
    );
    let _ = writeln!(out, "g needed for violation {:.6}", r.gamma_threshold_for_lhs);
    out
}

pub fn bounds_table(reports: &[BoundReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>7}  {:>8}  {:>12}  {:>24}  {:>24}  {:>9}",
        "alpha", "tau", "closed form", "quadrature ± err", "simulated gamma ± stderr", "satisfied"
    );
    for b in reports {
        let quad = match (b.quadrature, b.quadrature_abs_error) {
            (Some(q), Some(e)) => format!("{q:.6e} ± {e:.1e}"),
            _ => "divergent".to_string(),
        };
        let sim = match (b.simulated_gamma, b.simulated_stderr) {
            (Some(g), Some(e)) => format!("{g:.5e} ± {e:.1e}"),
            _ => "-".to_string(),
        };
        let _ = writeln!(
            out,
            "{:>7.2}  {:>8.1e}  {:>12.6e}  {:>24}  {:>24}  {:>9}",
            b.alpha.to_degrees(),
            b.tau,
            b.closed_form,
            quad,
            sim,
            b.satisfied
        );
    }
    out
}
