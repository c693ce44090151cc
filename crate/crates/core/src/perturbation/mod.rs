//! Metrics built from a prescribed profile function and the conditions
//! under which their Ricci integral stays negative.

pub mod build;
pub mod conditions;
pub mod profile_fn;
pub mod smoothed_bump;

pub use build::build_metric_from_f;
pub use conditions::{
    check_negativity_conditions, scalar_sign_scan, ConditionGrid, PerturbationBudget, PerturbationReport, SignSample,
    SIGN_NOISE,
};
pub use profile_fn::{ProfileFunction, ProfilePoint};
pub use smoothed_bump::{smoothed_bump_profile, SmoothedBump, DEFAULT_SMOOTHING_FRACTION};
