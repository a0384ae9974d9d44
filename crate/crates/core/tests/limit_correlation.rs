//! The simulator against an independent deterministic evaluation of the same
//! model: a midpoint grid over the sphere weighted by the exact same-bin
//! coincidence probability of each hidden direction.

use std::f64::consts::PI;

use eprb_core::{
    delay_scale, outcome, same_bin_probability_exact, ModelParams, Simulator, StreamKey, UnitVector3,
};

struct GridResult {
    gamma: f64,
    correlation: f64,
}

/// Conditional correlation and γ under same-bin tagging, by midpoint rule in
/// (z, φ), where dΩ = dz dφ.
fn grid_oracle(alpha: f64, params: &ModelParams, nz: usize, nphi: usize) -> GridResult {
    let a1 = UnitVector3::in_plane(0.0);
    let a2 = UnitVector3::in_plane(alpha);
    let (mut w_sum, mut wxy_sum) = (0.0, 0.0);
    for i in 0..nz {
        let z = -1.0 + (i as f64 + 0.5) * 2.0 / nz as f64;
        let r = (1.0 - z * z).sqrt();
        for j in 0..nphi {
            let phi = (j as f64 + 0.5) * 2.0 * PI / nphi as f64;
            let s = UnitVector3::normalize(r * phi.cos(), r * phi.sin(), z).unwrap();
            let t1 = delay_scale(&a1, &s, params);
            let t2 = delay_scale(&a2, &-s, params);
            let w = same_bin_probability_exact(t1, t2, params.tau).unwrap();
            w_sum += w;
            wxy_sum += w * f64::from(outcome(&a1, &s) * outcome(&a2, &-s));
        }
    }
    GridResult { gamma: w_sum / (nz * nphi) as f64, correlation: wxy_sum / w_sum }
}

#[test]
fn small_resolution_limit_is_the_singlet_correlation() {
    let params = ModelParams::same_bin(2.5e-4).unwrap();
    for deg in [15.0, 45.0, 60.0, 90.0, 120.0, 150.0] {
        let alpha = f64::to_radians(deg);
        let g = grid_oracle(alpha, &params, 1200, 2400);
        assert!(
            (g.correlation + alpha.cos()).abs() < 2e-4,
            "alpha = {deg}: E = {} vs {}",
            g.correlation,
            -alpha.cos()
        );
        // and the coincidence rate follows 16τ/(4π sin α)
        let expected = 16.0 * params.tau / (4.0 * PI * alpha.sin());
        assert!((g.gamma - expected).abs() / expected < 0.01, "alpha = {deg}: gamma {}", g.gamma);
    }
}

#[test]
fn simulated_rates_match_the_grid_oracle() {
    let sim = Simulator::new(1).unwrap();
    let params = ModelParams::same_bin(1e-2).unwrap();
    let n = 2_000_000;
    for (job, deg) in [0.0, 30.0, 90.0, 150.0].into_iter().enumerate() {
        let alpha = f64::to_radians(deg);
        let oracle = grid_oracle(alpha, &params, 800, 1600);
        let stats = sim
            .run(StreamKey::new(5).for_job(job as u64), UnitVector3::X, UnitVector3::in_plane(alpha), &params, n)
            .unwrap();
        let tol = 4.0 * stats.stderr_gamma + 0.002 * oracle.gamma;
        assert!(
            (stats.gamma_hat - oracle.gamma).abs() < tol,
            "alpha = {deg}: simulated {} vs oracle {}",
            stats.gamma_hat,
            oracle.gamma
        );
        let e = stats.e_conditional.unwrap();
        let se = stats.stderr_e.unwrap().max(1e-12);
        assert!((e - oracle.correlation).abs() <= 4.0 * se + 1e-12, "alpha = {deg}: E {e} vs {}", oracle.correlation);
    }
}
