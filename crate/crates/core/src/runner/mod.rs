//! Configuration, orchestration and persistence of experiment runs.

pub mod config;
pub mod experiments;
pub mod manifest;
pub mod report;
pub mod reproduce;

pub use config::ExperimentConfig;
pub use experiments::{
    run_bound_audit, run_chsh_experiment, run_correlation_sweep, ChshOutcome, PairResult, SweepRow, SweepTable,
};
pub use manifest::{RunInfo, RunManifest, RunResults};
pub use reproduce::{reproduce_paper, CriterionCheck, Reproduction};
