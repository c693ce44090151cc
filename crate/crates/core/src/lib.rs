//! Geodesics, curvature integrals and conformal perturbations of the
//! Riemannian Schwarzschild manifold in dimension `n ≥ 3`.
//!
//! Every routine is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64` or `f32`.

// `!(x > 0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conformal_metric;
pub mod curvature;
pub mod error;
pub mod frankel;
pub mod geodesic;
pub mod numerics;
pub mod perturbation;
pub mod scalar;

pub use conformal_metric::{
    areal_coordinate, f_phi, inversion_identity_residual, inversion_map, schwarzschild_profile, ArealCoordinate,
    ConformalExponent, MetricProfile, ProfileDiagnostics, SchwarzschildParams,
};
pub use curvature::{
    bakry_emery_ricci, conformal_ricci_oracle, ricci_along_geodesic, ricci_route_disagreement,
    ricci_sign_change_radius, scalar_curvature_finite_difference, scalar_curvature_from_profile_fn,
    scalar_curvature_u_form, CurvatureRoute, CurvatureSample,
};
pub use error::{Error, Result};
pub use frankel::{
    compare_routes, r_functional, r_series_converged, r_series_schwarzschild, ricci_integral_alpha_form,
    ricci_integral_direct, AlphaParameter, QuadratureResult, RouteComparison, SeriesResult,
};
pub use geodesic::{integrate_geodesic, GeodesicState, GeodesicTrace};
pub use perturbation::{
    build_metric_from_f, check_negativity_conditions, scalar_sign_scan, smoothed_bump_profile, ConditionGrid,
    PerturbationBudget, PerturbationReport, ProfileFunction,
};
pub use scalar::Real;

pub type Params64 = SchwarzschildParams<f64>;
pub type Params32 = SchwarzschildParams<f32>;
pub type Profile64 = MetricProfile<f64>;
pub type Profile32 = MetricProfile<f32>;
pub type Trace64 = GeodesicTrace<f64>;
pub type ProfileFunction64 = ProfileFunction<f64>;
pub type Report64 = PerturbationReport<f64>;
