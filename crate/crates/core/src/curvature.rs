//! Curvature of conformally flat rotationally symmetric metrics.

use serde::Serialize;

use crate::conformal_metric::{MetricProfile, SchwarzschildParams};
use crate::error::{Error, Result};
use crate::geodesic::{GeodesicState, GeodesicTrace};
use crate::scalar::Real;

/// Which formula produced a [`CurvatureSample`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureRoute {
    ClosedForm,
    ConformalGeneral,
    UForm,
    /// Finite-difference diagnostic; not a closed-form result.
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureSample<T> {
    /// Euclidean radius `r` or areal coordinate `u`, depending on the route.
    pub location: T,
    pub value: T,
    pub route: CurvatureRoute,
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

fn check_dims<T>(n: usize, vectors: &[&[T]]) -> Result<()> {
    for v in vectors {
        if v.len() != n {
            return Err(Error::Parameter(format!(
                "vector has {} components, expected {n}",
                v.len()
            )));
        }
    }
    Ok(())
}

fn check_outside_horizon<T: Real>(r: T, horizon: T) -> Result<()> {
    if !(r >= horizon * (T::one() - T::lit(16.0) * T::epsilon())) {
        return Err(Error::Domain(format!(
            "radius {:e} lies inside the horizon radius {:e}",
            r.as_f64(),
            horizon.as_f64()
        )));
    }
    Ok(())
}

/// `(prefactor, [n C₀² / u² − (n−1)])` of the geodesic Ricci closed form.
fn ricci_factors<T: Real>(params: &SchwarzschildParams<T>, r: T, c0: T) -> (T, T, T) {
    let n = T::of(params.n());
    let d = params.power();
    let base = params.conformal_base(r);
    let prefactor = params.m() * d / (r.powf(n) * base.powf(T::lit(2.0) * n / d));
    let u2 = r * r * base.powf(T::lit(4.0) / d);
    let pull = n * c0 * c0 / u2;
    (prefactor, pull, n - T::one())
}

/// `Ric(γ̇, γ̇)` at radius `r` along the perpendicular geodesic with
/// angular momentum `C₀`.
pub fn ricci_along_geodesic<T: Real>(params: &SchwarzschildParams<T>, r: T, c0: T) -> Result<T> {
    params.require_classic("the geodesic Ricci formula")?;
    check_outside_horizon(r, params.horizon_radius())?;
    if !(c0 > T::zero()) {
        return Err(Error::Parameter("C0 must be positive".into()));
    }
    let (prefactor, pull, push) = ricci_factors(params, r, c0);
    Ok(prefactor * (pull - push))
}

/// Scale of the two competing terms of [`ricci_along_geodesic`]; used to
/// compare routes where the value itself crosses zero.
pub fn ricci_term_scale<T: Real>(params: &SchwarzschildParams<T>, r: T, c0: T) -> T {
    let (prefactor, pull, push) = ricci_factors(params, r, c0);
    prefactor.abs() * (pull + push)
}

/// Radius where `Ric(γ̇, γ̇)` changes sign: `u(r)² = n C₀² / (n−1)`.
pub fn ricci_sign_change_radius<T: Real>(params: &SchwarzschildParams<T>, c0: T) -> Result<T> {
    params.require_classic("the geodesic Ricci formula")?;
    let n = T::of(params.n());
    let u = c0 * (n / (n - T::one())).sqrt();
    // u^{d/2} = t + m/(2t) with t = r^{d/2}; take the root outside the horizon
    let d = params.power();
    let half = d / T::lit(2.0);
    let ud = u.powf(d);
    let disc = ud - T::lit(2.0) * params.m();
    if disc < T::zero() {
        return Err(Error::Domain("C0 is below the horizon value".into()));
    }
    let t = (u.powf(half) + disc.sqrt()) / T::lit(2.0);
    Ok(t.powf(T::one() / half))
}

/// General Ricci formula for `g = e^{2φ} g_flat`:
/// `−(n−2)[Hess φ(v,v) − dφ(v)²] − (Δφ + (n−2)|∇φ|²)|v|²`.
///
/// `x` and `v` are flat components; `v` is not normalized.
pub fn conformal_ricci_oracle<T: Real>(profile: &MetricProfile<T>, x: &[T], v: &[T]) -> Result<T> {
    let n = profile.n();
    check_dims(n, &[x, v])?;
    let r = dot(x, x).sqrt();
    check_outside_horizon(r, profile.horizon_radius())?;
    let d1 = profile.dphi(r);
    let d2 = profile.d2phi(r);
    let nf = T::of(n);
    let two = T::lit(2.0);

    let v2 = dot(v, v);
    let radial = dot(x, v) / r;
    let hess = d2 * radial * radial + d1 / r * (v2 - radial * radial);
    let dphi_v = d1 * radial;
    let laplacian = d2 + (nf - T::one()) * d1 / r;
    Ok(-(nf - two) * (hess - dphi_v * dphi_v) - (laplacian + (nf - two) * d1 * d1) * v2)
}

/// Largest disagreement between the closed form and the conformal oracle
/// along a trace, relative to [`ricci_term_scale`].
pub fn ricci_route_disagreement<T: Real>(
    params: &SchwarzschildParams<T>,
    profile: &MetricProfile<T>,
    trace: &GeodesicTrace<T>,
) -> Result<T> {
    let n = params.n();
    let mut worst = T::zero();
    for st in &trace.states {
        let closed = ricci_along_geodesic(params, st.r, trace.c0)?;
        let oracle = oracle_at_state(profile, st, n)?;
        let scale = ricci_term_scale(params, st.r, trace.c0);
        worst = worst.max((closed - oracle).abs() / scale);
    }
    Ok(worst)
}

fn oracle_at_state<T: Real>(profile: &MetricProfile<T>, st: &GeodesicState<T>, n: usize) -> Result<T> {
    conformal_ricci_oracle(profile, &st.position(n), &st.velocity(n))
}

/// Scalar curvature of a three-dimensional metric `du²/f(u)² + u² g_sphere`
/// from `f` and the product `f·f'`:
/// `−(2/u²)(2u f f' − 1 + f²)`.
///
/// This is the cancelled form of `−(2f/u²)(2u f' − (1/f − f))`, finite where
/// `f` vanishes.
pub fn scalar_curvature_from_profile_fn<T: Real>(u: T, f: T, f_times_df: T) -> T {
    let two = T::lit(2.0);
    -(two / (u * u)) * (two * u * f_times_df - T::one() + f * f)
}

/// Scalar curvature of a three-dimensional profile at areal coordinate `u`.
pub fn scalar_curvature_u_form<T: Real>(profile: &MetricProfile<T>, u: T) -> Result<T> {
    if profile.n() != 3 {
        return Err(Error::UnsupportedDimension(profile.n()));
    }
    let f = profile.f_phi(u)?;
    let ff = profile.f_phi_times_derivative(u)?;
    Ok(scalar_curvature_from_profile_fn(u, f, ff))
}

/// Scalar curvature `−e^{−2φ}[2(n−1)Δφ + (n−1)(n−2)|∇φ|²]` with the radial
/// derivatives of `φ` taken by five-point finite differences.
///
/// Diagnostic only: it never uses the analytic derivatives of the profile.
pub fn scalar_curvature_finite_difference<T: Real>(profile: &MetricProfile<T>, r: T) -> Result<T> {
    check_outside_horizon(r, profile.horizon_radius())?;
    let h = r * T::lit(1e-3);
    let phi = |t: T| profile.phi(t);
    let (p2m, p1m, p0, p1p, p2p) = (phi(r - h - h), phi(r - h), phi(r), phi(r + h), phi(r + h + h));
    let twelve = T::lit(12.0);
    let eight = T::lit(8.0);
    let d1 = (p2m - eight * p1m + eight * p1p - p2p) / (twelve * h);
    let d2 = (-p2m + T::lit(16.0) * p1m - T::lit(30.0) * p0 + T::lit(16.0) * p1p - p2p) / (twelve * h * h);
    let n = T::of(profile.n());
    let laplacian = d2 + (n - T::one()) * d1 / r;
    let bracket = T::lit(2.0) * (n - T::one()) * laplacian + (n - T::one()) * (n - T::lit(2.0)) * d1 * d1;
    Ok(-(-T::lit(2.0) * p0).exp() * bracket)
}

/// Bakry–Émery Ricci tensor of flat space with the Schwarzschild weight,
/// evaluated on flat vectors `a`, `b` at `x`.
pub fn bakry_emery_ricci<T: Real>(params: &SchwarzschildParams<T>, x: &[T], a: &[T], b: &[T]) -> Result<T> {
    params.require_classic("the Bakry-Emery formula")?;
    let n = params.n();
    check_dims(n, &[x, a, b])?;
    let r2 = dot(x, x);
    if !(r2 > T::zero()) {
        return Err(Error::Domain("the weight is singular at the origin".into()));
    }
    let r = r2.sqrt();
    let m = params.m();
    let nf = T::of(n);
    let two = T::lit(2.0);
    let rd = r.powf(nf - two);
    let base = params.conformal_base(r);
    let isotropic = two * m / (r.powf(nf) * base);
    let radial = two * m * (nf * rd + m) / (r.powf(two * nf) * base * base);
    Ok(isotropic * dot(a, b) - radial * (dot(x, a) * dot(x, b)))
}
