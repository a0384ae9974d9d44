use eprb_core::runner::report::{bounds_csv, chsh_pairs_csv, sweep_csv};
use eprb_core::runner::{
    run_bound_audit, run_chsh_experiment, run_correlation_sweep, ExperimentConfig, RunInfo, RunManifest, RunResults,
};
use eprb_core::Simulator;

fn quick_config(seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        tau: 2e-3,
        window: 2e-3,
        n_events: 200_000,
        seed,
        alpha_grid_deg: vec![0.0, 45.0, 90.0],
        tau_grid: vec![1e-2],
        bound_alpha_grid_deg: vec![0.0, 90.0],
        ..Default::default()
    }
}

fn full_manifest(cfg: &ExperimentConfig, workers: usize) -> RunManifest {
    let sim = Simulator::new(workers).unwrap();
    let results = RunResults {
        sweep: Some(run_correlation_sweep(cfg, &sim).unwrap()),
        chsh: Some(run_chsh_experiment(cfg, &sim).unwrap()),
        bounds: Some(run_bound_audit(cfg, &sim).unwrap()),
    };
    let info = RunInfo { timestamp: "2026-01-01T00:00:00.000Z".into(), wall_clock_secs: 1.25, workers };
    RunManifest::new("test", cfg, results, info)
}

#[test]
fn manifest_round_trips_through_json_and_disk() {
    let m = full_manifest(&quick_config(11), 2);
    assert_eq!(RunManifest::from_json(&m.to_json().unwrap()).unwrap(), m);
    let dir = tempfile::tempdir().unwrap();
    let path = m.write(dir.path()).unwrap();
    assert_eq!(RunManifest::read(&path).unwrap(), m);
}

#[test]
fn worker_count_does_not_change_canonical_manifest() {
    let cfg = quick_config(12);
    let one = full_manifest(&cfg, 1);
    let eight = full_manifest(&ExperimentConfig { workers: Some(8), ..cfg.clone() }, 8);
    assert_eq!(one.canonical_json().unwrap(), eight.canonical_json().unwrap());
    assert_ne!(one.to_json().unwrap(), eight.to_json().unwrap());
}

#[test]
fn replaying_a_manifest_config_reproduces_it() {
    let m = full_manifest(&quick_config(13), 3);
    let replayed_cfg = RunManifest::from_json(&m.to_json().unwrap()).unwrap().config;
    let replay = full_manifest(&replayed_cfg, 1);
    assert_eq!(replay.results, m.results);
}

#[test]
fn different_seeds_differ() {
    let a = full_manifest(&quick_config(1), 1);
    let b = full_manifest(&quick_config(2), 1);
    assert_ne!(a.results, b.results);
}

#[test]
fn csv_tables_carry_errors_next_to_estimates() {
    let m = full_manifest(&quick_config(14), 1);
    let sweep = sweep_csv(m.results.sweep.as_ref().unwrap()).unwrap();
    let header = sweep.lines().next().unwrap();
    assert_eq!(
        header,
        "alpha_deg,n_events,n_coincident,gamma_hat,stderr_gamma,e_conditional,stderr_e,neg_cos_alpha,triangle,defined"
    );
    assert_eq!(sweep.lines().count(), 4);
    let pairs = chsh_pairs_csv(m.results.chsh.as_ref().unwrap()).unwrap();
    assert!(pairs.starts_with("pair,setting1_deg,setting2_deg,n_events,n_coincident,gamma_hat,stderr_gamma"));
    let bounds = bounds_csv(m.results.bounds.as_ref().unwrap()).unwrap();
    assert!(bounds.lines().next().unwrap().contains("quadrature_abs_error"));
    for line in sweep.lines().skip(1) {
        assert!(!line.contains(' '), "locale-free numbers: {line}");
    }
}
