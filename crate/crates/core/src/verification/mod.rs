//! Experiment harness: exponent tables, identity checks and the projection
//! and Strichartz sweeps.

mod fit;
mod identity;
mod kappa;
mod rng;
mod sweep;
mod wainger;

pub use fit::{band_ratio, fit_exponent, fit_power_law, max_ratio_per_level, ExponentFit};
pub use identity::{
    lower_bound_chain, verify_time_l2_identity, verify_time_l2_identity_many, IdentityReport, LowerBoundReport,
};
pub use kappa::{
    kappa_branch, kappa_p, kappa_p_branches, kappa_pq, kappa_range_check, kappa_threshold, s_q, Branch, BranchRange,
    KappaRangeReport,
};
pub use rng::{complex_gaussian, random_field, random_level_field, record_stream, stream_id};
pub use sweep::{
    projection_norm_sweep, strichartz_sweep, Family, ProjectionSweep, StrichartzSpec, StrichartzSweep, SweepRecord, TimePolicy,
};
pub use wainger::{verify_wainger, wainger_suite, WaingerReport, WaingerSuite};
