//! Core types for offline combinatorial bandits with probabilistically
//! triggered arms: actions, offline datasets, base-arm estimators and
//! data-coverage coefficients.

pub mod action;
pub mod bounds;
pub mod coverage;
pub mod dataset;
pub mod error;
pub mod estimate;
pub mod seed;

pub use action::{Action, ActionKind, ArmId};
pub use bounds::{gap_bound_inf, gap_bound_one, min_samples, GapBounds, SmoothnessSpec};
pub use coverage::{coverage_report, estimate_triggering, CoverageModel, CoverageReport};
pub use dataset::{Dataset, OfflineRecord};
pub use error::{CoreError, Result};
pub use estimate::{
    aggregate, lcb, ucb, variance_adaptive_interval, ArmStats, ConfidenceParams, RadiusForm,
};
pub use seed::{derive_seed, rng_from_seed, splitmix64, SimRng};
