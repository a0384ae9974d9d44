//! Event-based EPRB simulation with coincidence-time post-selection.
//!
//! A local hidden-variable model produces outcomes and time tags at two
//! stations; pairs are kept only when their tags coincide. The kept pairs
//! show singlet-like `-cos α` correlations, while the fraction kept, γ,
//! shrinks with the time resolution. The crate provides the generator, the
//! coincidence filter, CHSH and corrected-CHSH analysis, the analytic γ
//! bounds with their quadrature counterparts, and the experiment runner
//! behind the `eprb` command line.

pub mod bell;
pub mod bounds;
pub mod coincidence;
pub mod error;
pub mod model;
mod quadrature;
pub mod runner;
pub mod simulate;
pub mod stream;
pub mod vector;

pub use bell::{
    chsh_lhs, gamma_threshold, modified_bound, verdict, CorrelationQuartet, InequalityReport, GAMMA_ZERO,
};
pub use bounds::{
    approx_equal_settings, check_simulated_gamma, equal_settings_bound, equal_settings_quadrature,
    unequal_settings_bound, unequal_settings_quadrature, BoundReport,
};
pub use coincidence::{
    accumulate, coincidence_probability_exact, is_coincident, same_bin_probability_exact, CoincidenceStats,
    CoincidenceTally,
};
pub use error::{Error, Result};
pub use model::{
    delay_scale, generate_pair, outcome, sample_direction, sample_time_tag, CoincidenceMode, EventPair,
    ModelParams,
};
pub use runner::{ExperimentConfig, RunManifest};
pub use simulate::Simulator;
pub use stream::StreamKey;
pub use vector::UnitVector3;
