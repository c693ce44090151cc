//! Planar geodesics of the Schwarzschild metric that start perpendicular
//! to a totally geodesic hyperplane through the origin.
//!
//! The curve is `γ(s) = r(s)(cos θ(s), sin θ(s), 0, …)` with `θ(0) = 0`,
//! `ṙ(0) = 0` and unit speed. It is integrated in polar form so that both
//! first integrals (unit speed and the angular momentum `C₀`) are cheap to
//! monitor along the trace.

use serde::Serialize;

use crate::conformal_metric::SchwarzschildParams;
use crate::error::{Error, Result};
use crate::numerics::ode::{dormand_prince, Flow, OdeOptions};
use crate::scalar::Real;

/// Default relative tolerance of [`integrate_geodesic`].
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Ratio between the escape radius and `max(r0, R)` at which traces of
/// unbounded arclength are truncated.
pub const ESCAPE_RADIUS_FACTOR: f64 = 1e4;

/// Number of samples of an analytic horizon trace.
const HORIZON_SAMPLES: usize = 257;

/// Point of a geodesic in polar coordinates of its plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeodesicState<T> {
    pub s: T,
    pub r: T,
    pub theta: T,
    pub rdot: T,
    pub thetadot: T,
}

impl<T: Real> GeodesicState<T> {
    /// `|e^{2φ}(ṙ² + r²θ̇²) − 1|`.
    pub fn arclength_residual(&self, params: &SchwarzschildParams<T>) -> T {
        let e2phi = conformal_factor(params, self.r);
        (e2phi * (self.rdot * self.rdot + self.r * self.r * self.thetadot * self.thetadot) - T::one()).abs()
    }

    /// `C(s) = r² e^{2φ} θ̇`.
    pub fn angular_momentum(&self, params: &SchwarzschildParams<T>) -> T {
        self.r * self.r * conformal_factor(params, self.r) * self.thetadot
    }

    /// Flat-space position in the first two coordinates of `n`-space.
    pub fn position(&self, n: usize) -> Vec<T> {
        let mut x = vec![T::zero(); n];
        x[0] = self.r * self.theta.cos();
        x[1] = self.r * self.theta.sin();
        x
    }

    /// Flat-space components of `γ̇`.
    pub fn velocity(&self, n: usize) -> Vec<T> {
        let (sin, cos) = self.theta.sin_cos();
        let tangential = self.r * self.thetadot;
        let mut v = vec![T::zero(); n];
        v[0] = self.rdot * cos - tangential * sin;
        v[1] = self.rdot * sin + tangential * cos;
        v
    }
}

/// Discretized geodesic with conservation diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicTrace<T> {
    pub states: Vec<GeodesicState<T>>,
    /// Angular momentum `C₀ = r₀ (1 + m/(2 r₀^{n−2}))^{2/(n−2)}`.
    pub c0: T,
    pub max_arclength_residual: T,
    /// max over the trace of `|C(s) − C₀| / C₀`.
    pub max_c_residual: T,
    pub r0: T,
    /// True when the trace is the analytic horizon circle.
    pub on_horizon: bool,
}

impl<T: Real> GeodesicTrace<T> {
    pub fn last(&self) -> &GeodesicState<T> {
        self.states.last().expect("trace has at least one state")
    }

    /// True when `r` increases strictly between consecutive states.
    pub fn radius_strictly_increasing(&self) -> bool {
        self.states.windows(2).all(|w| w[1].r > w[0].r)
    }
}

/// `e^{2φ} = (1 + m/(2r^{n−2}))^{4/(n−2)}`.
fn conformal_factor<T: Real>(params: &SchwarzschildParams<T>, r: T) -> T {
    params.conformal_base(r).powf(T::lit(4.0) / params.power())
}

/// The angular momentum of the geodesic starting at `r0`; equals `u(r0)`.
pub fn angular_momentum_at<T: Real>(params: &SchwarzschildParams<T>, r0: T) -> T {
    r0 * params.conformal_base(r0).powf(T::lit(2.0) / params.power())
}

fn horizon_tolerance<T: Real>() -> T {
    T::lit(16.0) * T::epsilon()
}

fn is_on_horizon<T: Real>(params: &SchwarzschildParams<T>, r0: T) -> bool {
    let big = params.horizon_radius();
    (r0 - big).abs() <= horizon_tolerance::<T>() * big
}

/// Initial data `s = θ = ṙ = 0`, `θ̇ = (1 + m/(2r₀^{n−2}))^{−2/(n−2)} / r₀`.
pub fn initial_state<T: Real>(params: &SchwarzschildParams<T>, r0: T) -> Result<GeodesicState<T>> {
    params.require_classic("the geodesic system")?;
    let big = params.horizon_radius();
    if !(r0 >= big * (T::one() - horizon_tolerance::<T>())) || !r0.is_finite() {
        return Err(Error::Domain(format!(
            "initial radius {:e} lies inside the horizon radius {:e}",
            r0.as_f64(),
            big.as_f64()
        )));
    }
    let r0 = r0.max(big);
    Ok(GeodesicState {
        s: T::zero(),
        r: r0,
        theta: T::zero(),
        rdot: T::zero(),
        thetadot: params.conformal_base(r0).powf(-T::lit(2.0) / params.power()) / r0,
    })
}

fn rhs_components<T: Real>(params: &SchwarzschildParams<T>, r: T, rdot: T, thetadot: T) -> (T, T) {
    let n = T::of(params.n());
    let m = params.m();
    let d = params.power();
    let base = params.conformal_base(r);
    let r_nm1 = r.powf(n - T::one());
    let two = T::lit(2.0);
    let rddot =
        r * thetadot * thetadot + two * m * rdot * rdot / (r_nm1 * base) - m / (r_nm1 * base.powf((n + two) / d));
    let thetaddot = -two * rdot * thetadot / r + two * m * rdot * thetadot / (r_nm1 * base);
    (rddot, thetaddot)
}

/// Right-hand side `(ṙ, θ̇, r̈, θ̈)` of the polar geodesic equations.
pub fn geodesic_rhs<T: Real>(params: &SchwarzschildParams<T>, state: &GeodesicState<T>) -> Result<[T; 4]> {
    params.require_classic("the geodesic system")?;
    if !(state.r > T::zero()) {
        return Err(Error::Domain(format!("radius {:e} must be positive", state.r.as_f64())));
    }
    let (rddot, thetaddot) = rhs_components(params, state.r, state.rdot, state.thetadot);
    Ok([state.rdot, state.thetadot, rddot, thetaddot])
}

/// Closed-form radial speed
/// `ṙ = sqrt(r² e^{2φ} − C₀²) / (r e^{2φ})` valid along the whole geodesic.
pub fn radial_speed_closed_form<T: Real>(params: &SchwarzschildParams<T>, r: T, c0: T) -> Result<T> {
    params.require_classic("the radial speed formula")?;
    let u = angular_momentum_at(params, r);
    let arg = (u - c0) * (u + c0);
    if arg < -T::lit(1e-9) * c0 * c0 {
        return Err(Error::Domain(format!(
            "r = {:e} is not reachable with C0 = {:e}",
            r.as_f64(),
            c0.as_f64()
        )));
    }
    Ok(arg.max(T::zero()).sqrt() / (r * conformal_factor(params, r)))
}

/// A trace together with the running integral of a scalar along it.
#[derive(Debug, Clone)]
pub(crate) struct AugmentedTrace<T> {
    pub trace: GeodesicTrace<T>,
    /// Cumulative `∫₀^{s_i} g ds` at every state.
    pub cumulative: Vec<T>,
    /// Right-hand-side evaluations spent by the integrator.
    pub evaluations: usize,
}

/// Integrates the geodesic and `∫ integrand(state) ds` in one adaptive run.
pub(crate) fn integrate_augmented<T, G>(
    params: &SchwarzschildParams<T>,
    r0: T,
    s_max: T,
    tol: T,
    integrand: G,
) -> Result<AugmentedTrace<T>>
where
    T: Real,
    G: Fn(&GeodesicState<T>) -> T,
{
    let start = initial_state(params, r0)?;
    if !(s_max > T::zero()) {
        return Err(Error::Parameter("s_max must be positive".into()));
    }
    if !(tol > T::zero()) {
        return Err(Error::Parameter("tolerance must be positive".into()));
    }
    let c0 = angular_momentum_at(params, start.r);

    if is_on_horizon(params, r0) {
        if !s_max.is_finite() {
            return Err(Error::Domain(
                "the horizon geodesic never escapes; give a finite arclength".into(),
            ));
        }
        return Ok(horizon_trace(params, start, c0, s_max, &integrand));
    }

    let escape = T::lit(ESCAPE_RADIUS_FACTOR) * start.r.max(params.horizon_radius());
    let mut states = vec![start];
    let mut cumulative = vec![T::zero()];
    let to_state = |s: T, y: &[T; 5]| GeodesicState {
        s,
        r: y[0],
        theta: y[1],
        rdot: y[2],
        thetadot: y[3],
    };
    let opts = OdeOptions::new(tol * T::lit(0.1), T::min_positive_value().sqrt() * tol);

    let (_, _, stats) = dormand_prince(
        |_s, y: &[T; 5]| {
            let state = to_state(T::zero(), y);
            let (rddot, thetaddot) = rhs_components(params, y[0], y[2], y[3]);
            [y[2], y[3], rddot, thetaddot, integrand(&state)]
        },
        T::zero(),
        [start.r, start.theta, start.rdot, start.thetadot, T::zero()],
        s_max,
        opts,
        |s, y| {
            states.push(to_state(s, y));
            cumulative.push(y[4]);
            if !s_max.is_finite() && y[0] >= escape {
                Flow::Stop
            } else {
                Flow::Continue
            }
        },
    )?;

    let trace = finish_trace(params, states, c0, start.r, false);
    Ok(AugmentedTrace {
        trace,
        cumulative,
        evaluations: 6 * (stats.accepted + stats.rejected) + 3,
    })
}

fn horizon_trace<T, G>(
    params: &SchwarzschildParams<T>,
    start: GeodesicState<T>,
    c0: T,
    s_max: T,
    integrand: &G,
) -> AugmentedTrace<T>
where
    T: Real,
    G: Fn(&GeodesicState<T>) -> T,
{
    let last = T::of(HORIZON_SAMPLES - 1);
    let states: Vec<_> = (0..HORIZON_SAMPLES)
        .map(|i| {
            let s = s_max * T::of(i) / last;
            GeodesicState {
                s,
                theta: start.thetadot * s,
                ..start
            }
        })
        .collect();
    // constant integrand along the circle
    let rate = integrand(&start);
    let cumulative = states.iter().map(|st| rate * st.s).collect();
    AugmentedTrace {
        trace: finish_trace(params, states, c0, start.r, true),
        cumulative,
        evaluations: 1,
    }
}

fn finish_trace<T: Real>(
    params: &SchwarzschildParams<T>,
    states: Vec<GeodesicState<T>>,
    c0: T,
    r0: T,
    on_horizon: bool,
) -> GeodesicTrace<T> {
    let max_arclength_residual = states
        .iter()
        .map(|st| st.arclength_residual(params))
        .fold(T::zero(), T::max);
    let max_c_residual = states
        .iter()
        .map(|st| ((st.angular_momentum(params) - c0) / c0).abs())
        .fold(T::zero(), T::max);
    GeodesicTrace {
        states,
        c0,
        max_arclength_residual,
        max_c_residual,
        r0,
        on_horizon,
    }
}

/// Integrates the geodesic from `r0` up to arclength `s_max`.
///
/// With `s_max = ∞` the trace stops once `r` exceeds
/// `10⁴·max(r0, R)`. A geodesic starting on the horizon is returned in
/// closed form (`r ≡ R`, `θ = θ̇(0) s`).
pub fn integrate_geodesic<T: Real>(
    params: &SchwarzschildParams<T>,
    r0: T,
    s_max: T,
    tol: T,
) -> Result<GeodesicTrace<T>> {
    integrate_augmented(params, r0, s_max, tol, |_| T::zero()).map(|a| a.trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(n: usize, m: f64) -> SchwarzschildParams<f64> {
        SchwarzschildParams::schwarzschild(n, m).unwrap()
    }

    #[test]
    fn initial_state_on_horizon() {
        let p = params(3, 2.0);
        let st = initial_state(&p, 1.0).unwrap();
        assert_relative_eq!(st.thetadot, 0.25, max_relative = 1e-15);
        assert!(st.arclength_residual(&p) < 1e-14);
        assert!(matches!(initial_state(&p, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn initial_acceleration_matches_closed_form() {
        for &(n, m, r0) in &[(3usize, 2.0_f64, 2.0_f64), (4, 1.0, 3.0), (7, 0.5, 1.3)] {
            let p = params(n, m);
            let st = initial_state(&p, r0).unwrap();
            let rhs = geodesic_rhs(&p, &st).unwrap();
            let nf = n as f64;
            let base = 1.0 + m / (2.0 * r0.powf(nf - 2.0));
            let expected = (r0.powf(nf - 2.0) - m / 2.0) / (r0.powf(nf - 1.0) * base.powf((nf + 2.0) / (nf - 2.0)));
            assert_relative_eq!(rhs[2], expected, max_relative = 1e-12);
            assert!(rhs[2] > 0.0);
        }
        let p = params(3, 2.0);
        let st = initial_state(&p, 1.0).unwrap();
        assert!(geodesic_rhs(&p, &st).unwrap()[2].abs() < 1e-15);
    }

    #[test]
    fn rhs_parity_in_angular_velocity() {
        let p = params(5, 1.0);
        let st = GeodesicState {
            s: 0.3,
            r: 1.7,
            theta: 0.2,
            rdot: 0.4,
            thetadot: 0.13,
        };
        let flipped = GeodesicState {
            thetadot: -st.thetadot,
            ..st
        };
        let a = geodesic_rhs(&p, &st).unwrap();
        let b = geodesic_rhs(&p, &flipped).unwrap();
        assert_eq!(a[2], b[2]);
        assert_eq!(a[3], -b[3]);
    }

    #[test]
    fn horizon_geodesic_stays_on_horizon() {
        let p = params(3, 2.0);
        let tr = integrate_geodesic(&p, 1.0, 50.0, 1e-10).unwrap();
        assert!(tr.on_horizon);
        assert!(tr.states.iter().all(|s| (s.r - 1.0).abs() < 1e-9));
        assert!(tr.max_arclength_residual < 1e-14);
        assert!(integrate_geodesic(&p, 1.0, f64::INFINITY, 1e-10).is_err());
    }

    #[test]
    fn escaping_geodesic_is_monotone() {
        let p = params(3, 2.0);
        let tr = integrate_geodesic(&p, 2.0, 1e3, 1e-10).unwrap();
        assert!(tr.radius_strictly_increasing());
        assert_relative_eq!(tr.last().s, 1e3, max_relative = 1e-15);
        assert!(tr.last().r > 100.0 * 2.0);
        assert!(tr.states.windows(2).all(|w| w[1].s > w[0].s));
    }

    #[test]
    fn angular_momentum_conserved() {
        let p = params(4, 1.0);
        let tol = 1e-10;
        let tr = integrate_geodesic(&p, 3.0, f64::INFINITY, tol).unwrap();
        assert!(tr.max_c_residual < tol, "{}", tr.max_c_residual);
        assert!(tr.max_arclength_residual < tol, "{}", tr.max_arclength_residual);
        assert!(tr.last().r >= 3e4);
    }

    #[test]
    fn radial_speed_examples() {
        let p = params(3, 2.0);
        let c0 = angular_momentum_at(&p, 2.0);
        assert_eq!(radial_speed_closed_form(&p, 2.0, c0).unwrap(), 0.0);
        let far = radial_speed_closed_form(&p, 1e6, c0).unwrap();
        assert!((far - 1.0).abs() < 1e-5);
        assert!(radial_speed_closed_form(&p, 1.5, c0).is_err());
    }

    #[test]
    fn radial_speed_agrees_with_trace() {
        let p = params(3, 2.0);
        let tr = integrate_geodesic(&p, 2.0, f64::INFINITY, 1e-10).unwrap();
        for st in &tr.states {
            let cf = radial_speed_closed_form(&p, st.r, tr.c0).unwrap();
            assert!(
                (cf - st.rdot).abs() < 1e-7,
                "r = {} ode {} closed {}",
                st.r,
                st.rdot,
                cf
            );
        }
    }

    #[test]
    fn tighter_tolerance_reduces_residuals() {
        let p = params(5, 1.0);
        let r0 = 2.0 * p.horizon_radius();
        let coarse = integrate_geodesic(&p, r0, f64::INFINITY, 1e-6).unwrap();
        let fine = integrate_geodesic(&p, r0, f64::INFINITY, 5e-7).unwrap();
        assert!(fine.max_arclength_residual < coarse.max_arclength_residual);
        assert!(fine.max_c_residual < coarse.max_c_residual);
    }

    #[test]
    fn generalized_metrics_are_rejected() {
        let p = SchwarzschildParams::new(5, 1.0_f64, 2).unwrap();
        assert!(initial_state(&p, 2.0).is_err());
    }
}
