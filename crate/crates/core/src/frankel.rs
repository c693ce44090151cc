//! The Ricci integral `∫ −Ric(γ̇, γ̇) ds` along perpendicular geodesics,
//! evaluated by independent routes:
//!
//! * direct: accumulated alongside the geodesic ODE,
//! * angular: a bounded one-dimensional integral in the parameter `α`,
//! * areal: the `u`-coordinate functional `R(φ, u₀)`, valid for any profile,
//! * series: a power series in `α` for the Schwarzschild profile.

use std::cell::Cell;

use serde::Serialize;

use crate::conformal_metric::{schwarzschild_profile, MetricProfile, SchwarzschildParams};
use crate::curvature::ricci_along_geodesic;
use crate::error::{Error, Result};
use crate::geodesic::{angular_momentum_at, integrate_augmented};
use crate::numerics::quadrature::integrate_relative;
use crate::scalar::Real;

pub use crate::numerics::special::wallis;

/// `sin ψ` at the lower end of the areal integral, i.e. the truncation
/// `u ≤ 10⁶ u₀`.
pub const AREAL_TRUNCATION_SIN: f64 = 1e-6;

/// Hard cap on the number of series terms.
pub const MAX_SERIES_TERMS: usize = 10_000_000;

/// Relative tail target used by [`r_series_converged`] callers by default.
pub const DEFAULT_SERIES_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub error_estimate: T,
    /// Upper end actually integrated to: arclength for the direct route,
    /// `u` for the areal route, `π/2` for the angular route.
    pub truncation_point: T,
    pub evaluations: usize,
}

/// `α = 2m / C₀^{n−2}` stored with its complement so that `1 − α` keeps
/// full precision for starts close to the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaParameter<T> {
    pub alpha: T,
    pub complement: T,
}

impl<T: Real> AlphaParameter<T> {
    pub fn new(alpha: T) -> Result<Self> {
        if !(T::zero()..=T::one()).contains(&alpha) {
            return Err(Error::Parameter(format!(
                "alpha = {:e} must lie in [0, 1]",
                alpha.as_f64()
            )));
        }
        Ok(Self {
            alpha,
            complement: T::one() - alpha,
        })
    }

    /// The parameter of the geodesic starting at `r0 ≥ R`.
    pub fn from_start(params: &SchwarzschildParams<T>, r0: T) -> Result<Self> {
        params.require_classic("the alpha parameter")?;
        let big = params.horizon_radius();
        if !(r0 >= big * (T::one() - T::lit(16.0) * T::epsilon())) {
            return Err(Error::Domain(format!(
                "initial radius {:e} lies inside the horizon radius {:e}",
                r0.as_f64(),
                big.as_f64()
            )));
        }
        if (r0 - big).abs() <= big * T::lit(16.0) * T::epsilon() {
            return Ok(Self {
                alpha: T::one(),
                complement: T::zero(),
            });
        }
        // C₀^{n−2} = (t + m/(2t))² with t = r0^{(n−2)/2}
        let t = r0.powf(params.power() / T::lit(2.0));
        let half_m = params.m() / T::lit(2.0);
        let plus = t + half_m / t;
        let minus = (t - half_m / t).max(T::zero());
        let c0d = plus * plus;
        let complement = minus * minus / c0d;
        let alpha = if complement == T::zero() {
            T::one()
        } else {
            (T::lit(2.0) * params.m() / c0d).min(T::one())
        };
        Ok(Self { alpha, complement })
    }

    fn from_areal(params: &SchwarzschildParams<T>, u0: T) -> Self {
        let ud = u0.powf(params.power());
        let two_m = T::lit(2.0) * params.m();
        Self {
            alpha: two_m / ud,
            complement: (ud - two_m) / ud,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesResult<T> {
    pub value: T,
    pub terms_used: usize,
    /// Bound on the magnitude of the omitted terms.
    pub tail_bound: T,
}

/// Running value of `∫₀^s −Ric ds` at a trace state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartialIntegral<T> {
    pub s: T,
    pub r: T,
    pub value: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectIntegral<T> {
    pub result: QuadratureResult<T>,
    pub partials: Vec<PartialIntegral<T>>,
}

/// `∫₀^d −Ric(γ̇, γ̇) ds` along the geodesic from `r0`, with cumulative
/// values at every trace state. `d = ∞` stops at `r = 10⁴·max(r0, R)` and
/// bounds the rest analytically.
pub fn ricci_integral_direct_with_partials<T: Real>(
    params: &SchwarzschildParams<T>,
    r0: T,
    d: T,
    tol: T,
) -> Result<DirectIntegral<T>> {
    params.require_classic("the direct Ricci integral")?;
    if !(d > T::zero()) {
        return Err(Error::Parameter("arclength d must be positive".into()));
    }
    let c0 = angular_momentum_at(params, r0.max(params.horizon_radius()));
    let aug = integrate_augmented(params, r0, d, tol, |st| {
        -ricci_along_geodesic(params, st.r, c0).unwrap_or_else(|_| T::nan())
    })?;
    let trace = &aug.trace;
    let last = trace.last();
    let value = *aug.cumulative.last().expect("non-empty trace");

    let variation = aug
        .cumulative
        .windows(2)
        .fold(T::zero(), |acc, w| acc + (w[1] - w[0]).abs());
    let mut error_estimate = T::lit(10.0) * tol * variation;
    if !d.is_finite() {
        // |Ric| ≤ (n−1)(n−2)m / r^n and ds ≤ dr / ṙ_T beyond the cut
        let n = T::of(params.n());
        let tail = params.m() * (n - T::lit(2.0)) / (last.rdot * last.r.powf(n - T::one()));
        error_estimate = error_estimate + tail;
    }

    let partials = trace
        .states
        .iter()
        .zip(&aug.cumulative)
        .map(|(st, &value)| PartialIntegral {
            s: st.s,
            r: st.r,
            value,
        })
        .collect();
    Ok(DirectIntegral {
        result: QuadratureResult {
            value,
            error_estimate,
            truncation_point: last.s,
            evaluations: aug.evaluations,
        },
        partials,
    })
}

/// [`ricci_integral_direct_with_partials`] without the partial values.
pub fn ricci_integral_direct<T: Real>(
    params: &SchwarzschildParams<T>,
    r0: T,
    d: T,
    tol: T,
) -> Result<QuadratureResult<T>> {
    ricci_integral_direct_with_partials(params, r0, d, tol).map(|di| di.result)
}

/// `∫₀^{π/2} ((n−1) sin^{n−2}ψ − n sinⁿψ) / sqrt(1 − α sin^{n−2}ψ) dψ`.
pub fn ricci_integral_alpha_form<T: Real>(n: usize, alpha: T, tol: T) -> Result<QuadratureResult<T>> {
    if alpha >= T::one() {
        return Err(Error::Domain(
            "the angular integral diverges at alpha = 1; use the horizon closed form".into(),
        ));
    }
    angular_integral(n, AlphaParameter::new(alpha)?, tol)
}

/// Angular integral from an [`AlphaParameter`], using its stored complement.
pub fn angular_integral<T: Real>(n: usize, alpha: AlphaParameter<T>, tol: T) -> Result<QuadratureResult<T>> {
    if n < 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    if !(alpha.complement > T::zero()) {
        return Err(Error::Domain(
            "the angular integral diverges at alpha = 1; use the horizon closed form".into(),
        ));
    }
    if !(tol > T::zero()) {
        return Err(Error::Parameter("tolerance must be positive".into()));
    }
    let nf = T::of(n);
    let d = nf - T::lit(2.0);
    let half_pi = T::FRAC_PI_2();
    // t = π/2 − ψ, so sin ψ = cos t and the peak sits at t = 0
    let integrand = |t: T| {
        let half = (t / T::lit(2.0)).sin();
        let ln_cos = (-T::lit(2.0) * half * half).ln_1p();
        let cos_d = (d * ln_cos).exp();
        let one_minus_cos_d = -(d * ln_cos).exp_m1();
        let cos2 = (T::lit(2.0) * ln_cos).exp();
        let numerator = cos_d * ((nf - T::one()) - nf * cos2);
        numerator / (alpha.complement + alpha.alpha * one_minus_cos_d).sqrt()
    };
    let res = integrate_relative(integrand, T::zero(), half_pi, tol)?;
    Ok(QuadratureResult {
        value: res.value,
        error_estimate: res.error,
        truncation_point: half_pi,
        evaluations: res.evaluations,
    })
}

/// The direct integral to `d = ∞` recovered from the angular form:
/// `m(n−2)/C₀^{n−1} · J(α)`.
pub fn ricci_integral_alpha_route<T: Real>(
    params: &SchwarzschildParams<T>,
    r0: T,
    tol: T,
) -> Result<QuadratureResult<T>> {
    let alpha = AlphaParameter::from_start(params, r0)?;
    let c0 = angular_momentum_at(params, r0.max(params.horizon_radius()));
    let j = angular_integral(params.n(), alpha, tol)?;
    let scale = params.m() * params.power() / c0.powf(T::of(params.n()) - T::one());
    Ok(QuadratureResult {
        value: scale * j.value,
        error_estimate: scale * j.error_estimate,
        ..j
    })
}

/// `R(φ, u₀)` for a profile given by `u ↦ (f(u), 1 − f(u), f'(u))` on
/// `(C_φ, ∞)`. The separate `1 − f` keeps `1/f − f` accurate where `f ≈ 1`.
pub fn r_functional_from_fn<T, F>(n: usize, areal_horizon: T, u0: T, tol: T, f: F) -> Result<QuadratureResult<T>>
where
    T: Real,
    F: Fn(T) -> Result<(T, T, T)>,
{
    if n < 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    if !(u0 > areal_horizon) {
        return Err(Error::Domain(format!(
            "u0 = {:e} must exceed C_φ = {:e}",
            u0.as_f64(),
            areal_horizon.as_f64()
        )));
    }
    if !(tol > T::zero()) {
        return Err(Error::Parameter("tolerance must be positive".into()));
    }
    let nf = T::of(n);
    let d = nf - T::lit(2.0);
    let failure: Cell<Option<Error>> = Cell::new(None);
    // u = u0 / sin ψ turns du / sqrt(u² − u0²) into dψ / sin ψ
    let integrand = |psi: T| {
        let s = psi.sin();
        let u = u0 / s;
        match f(u) {
            Ok((fu, deficit, dfu)) => {
                let w = d * u0 * u0 / (u * u * u);
                let b = deficit * (T::one() + fu) / fu;
                let g = ((nf - T::one()) / u - w) * (u * dfu) - w * b;
                g / s
            }
            Err(e) => {
                failure.set(Some(e));
                T::nan()
            }
        }
    };
    let psi_min = T::lit(AREAL_TRUNCATION_SIN).asin();
    let res = integrate_relative(&integrand, psi_min, T::FRAC_PI_2(), tol);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let res = res?;
    // the integrand vanishes like ψ^{n−2} at 0 and is monotone there
    let tail = integrand(psi_min).abs() * psi_min;
    Ok(QuadratureResult {
        value: res.value,
        error_estimate: res.error + tail,
        truncation_point: u0 / T::lit(AREAL_TRUNCATION_SIN),
        evaluations: res.evaluations + 1,
    })
}

/// `R(φ, u₀) = ∫_{u₀}^∞ [((n−1)/u − (n−2)u₀²/u³)·u f' − ((n−2)u₀²/u³)(1/f − f)] / sqrt(u² − u₀²) du`.
pub fn r_functional<T: Real>(profile: &MetricProfile<T>, u0: T, tol: T) -> Result<QuadratureResult<T>> {
    r_functional_from_fn(profile.n(), profile.areal_horizon(), u0, tol, |u| {
        Ok((
            profile.f_phi(u)?,
            profile.f_phi_deficit(u)?,
            profile.f_phi_derivative(u)?,
        ))
    })
}

/// Sums the series until `stop(terms_used, tail_bound, partial_sum)` holds.
fn sum_series<T, S>(params: &SchwarzschildParams<T>, u0: T, mut stop: S) -> Result<SeriesResult<T>>
where
    T: Real,
    S: FnMut(usize, T, T) -> bool,
{
    params.require_classic("the series")?;
    let d_int = params.n() - 2;
    let d = params.power();
    let big_c = (T::lit(2.0) * params.m()).powf(T::one() / d);
    if !(u0 > big_c) {
        return Err(Error::Domain(format!(
            "u0 = {:e} must exceed (2m)^(1/(n-2)) = {:e}",
            u0.as_f64(),
            big_c.as_f64()
        )));
    }
    let alpha = AlphaParameter::from_areal(params, u0);
    let shift = (T::lit(2.0) * T::of(params.n()) - T::lit(2.0)) / d;

    // W(q) for integer q, advanced one or two degrees at a time
    let advance = |q: usize, wq: T, wq1: T| -> (T, T) {
        // returns (W(q+1), W(q+2)) from (W(q), W(q+1))
        let w2 = wq * T::of(q + 1) / T::of(q + 2);
        (wq1, w2)
    };
    let mut q = 2 * d_int;
    let mut wq = wallis(T::of(q));
    let mut wq1 = wallis(T::of(q + 1));

    // coefficient C(2j+1, j) / 2^{2j+1} and α^{j+2}
    let mut binom = T::lit(0.5);
    let mut power = alpha.alpha * alpha.alpha;
    let prefactor = d / (T::lit(2.0) * u0);

    let mut sum = T::zero();
    let mut compensation = T::zero();
    let mut j = 0usize;
    loop {
        let jf = T::of(j);
        let term = -prefactor * binom * (jf + T::one()) / (jf + shift) * wq * power;
        // Neumaier summation
        let t = sum + term;
        if sum.abs() >= term.abs() {
            compensation = compensation + ((sum - t) + term);
        } else {
            compensation = compensation + ((term - t) + sum);
        }
        sum = t;
        j += 1;

        // from j = 1 on consecutive terms shrink by at least the factor α;
        // the first ratio is only bounded by 2α
        let ratio = if j == 1 { T::lit(2.0) * alpha.alpha } else { alpha.alpha };
        let tail = if alpha.alpha == T::zero() {
            T::zero()
        } else {
            term.abs() * ratio / alpha.complement
        };
        let total = sum + compensation;
        if stop(j, tail, total) || j >= MAX_SERIES_TERMS {
            return Ok(SeriesResult {
                value: total,
                terms_used: j,
                tail_bound: tail,
            });
        }

        binom = binom * T::of(2 * j + 1) / T::of(2 * (j + 1));
        power = power * alpha.alpha;
        for _ in 0..d_int {
            let (a, b) = advance(q, wq, wq1);
            wq = a;
            wq1 = b;
            q += 1;
        }
    }
}

/// First `terms` terms of the Schwarzschild series for `R(φ, u₀)`.
pub fn r_series_schwarzschild<T: Real>(
    params: &SchwarzschildParams<T>,
    u0: T,
    terms: usize,
) -> Result<SeriesResult<T>> {
    if terms == 0 {
        return Err(Error::Parameter("at least one series term is required".into()));
    }
    sum_series(params, u0, |used, _, _| used >= terms)
}

/// The Schwarzschild series summed until its tail bound drops below
/// `rel_tol·|sum|` (or [`MAX_SERIES_TERMS`] are used).
pub fn r_series_converged<T: Real>(params: &SchwarzschildParams<T>, u0: T, rel_tol: T) -> Result<SeriesResult<T>> {
    sum_series(params, u0, |_, tail, sum| tail <= rel_tol * sum.abs())
}

/// `|a − b| / max(|a|, |b|)`.
pub fn relative_difference<T: Real>(a: T, b: T) -> T {
    let scale = a.abs().max(b.abs());
    if scale == T::zero() {
        T::zero()
    } else {
        (a - b).abs() / scale
    }
}

/// All available routes for one start radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteComparison<T> {
    pub n: usize,
    pub m: T,
    pub k: usize,
    pub r0: T,
    pub u0: T,
    pub alpha: Option<T>,
    pub direct: Option<T>,
    /// Angular route for `k = 1`; the areal functional otherwise.
    pub alpha_form: Option<T>,
    pub series: Option<T>,
    /// Largest disagreement between a route through the ODE and any other.
    pub ode_reldiff: T,
    /// Disagreement between the quadrature and series routes.
    pub quadrature_series_reldiff: T,
    pub max_pairwise_reldiff: T,
    pub negative: bool,
}

/// Evaluates every route defined for `params` at the start radius `r0 > R`.
pub fn compare_routes<T: Real>(params: &SchwarzschildParams<T>, r0: T, tol: T) -> Result<RouteComparison<T>> {
    if params.k() != 1 {
        let profile = schwarzschild_profile(*params)?;
        let u0 = profile.areal(r0);
        let areal = r_functional(&profile, u0, tol)?.value;
        return Ok(RouteComparison {
            n: params.n(),
            m: params.m(),
            k: params.k(),
            r0,
            u0,
            alpha: None,
            direct: None,
            alpha_form: Some(areal),
            series: None,
            ode_reldiff: T::zero(),
            quadrature_series_reldiff: T::zero(),
            max_pairwise_reldiff: T::zero(),
            negative: areal < T::zero(),
        });
    }
    let alpha = AlphaParameter::from_start(params, r0)?;
    let u0 = angular_momentum_at(params, r0);
    let direct = ricci_integral_direct(params, r0, T::infinity(), tol)?.value;
    let angular = ricci_integral_alpha_route(params, r0, tol)?.value;
    let series = r_series_converged(params, u0, T::lit(DEFAULT_SERIES_TOLERANCE))?.value;
    let ode_reldiff = relative_difference(direct, angular).max(relative_difference(direct, series));
    let quadrature_series_reldiff = relative_difference(angular, series);
    Ok(RouteComparison {
        n: params.n(),
        m: params.m(),
        k: 1,
        r0,
        u0,
        alpha: Some(alpha.alpha),
        direct: Some(direct),
        alpha_form: Some(angular),
        series: Some(series),
        ode_reldiff,
        quadrature_series_reldiff,
        max_pairwise_reldiff: ode_reldiff.max(quadrature_series_reldiff),
        negative: direct < T::zero() && angular < T::zero() && series < T::zero(),
    })
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(n: usize, m: f64) -> SchwarzschildParams<f64> {
        SchwarzschildParams::schwarzschild(n, m).unwrap()
    }

    // reference values from an independent 30-digit quadrature
    const ANGULAR_REFERENCE: [(usize, f64, f64); 5] = [
        (3, 0.5, -0.095150051275628929),
        (4, 0.3, -0.040688211794886612),
        (5, 0.7, -0.16884068458938304),
        (7, 0.9, -0.35241537737714333),
        (3, 0.9, -0.56873336817119693),
    ];

    #[test]
    fn angular_integral_reference_values() {
        for &(n, alpha, expected) in &ANGULAR_REFERENCE {
            let j = ricci_integral_alpha_form(n, alpha, 1e-12).unwrap();
            assert_relative_eq!(j.value, expected, max_relative = 1e-11);
            assert!(j.error_estimate < 1e-10);
        }
    }

    #[test]
    fn angular_integral_boundary_cases() {
        for n in [3usize, 4, 5, 7, 11] {
            assert!(ricci_integral_alpha_form(n, 0.0_f64, 1e-10).unwrap().value.abs() < 1e-10);
        }
        assert!(matches!(
            ricci_integral_alpha_form(3, 1.0, 1e-10),
            Err(Error::Domain(_))
        ));
        assert!(ricci_integral_alpha_form(3, -0.1, 1e-10).is_err());
    }

    #[test]
    fn angular_integral_negative_and_decreasing() {
        for n in [3usize, 4, 5, 7] {
            let mut prev = 0.0;
            for i in 1..=9 {
                let v = ricci_integral_alpha_form(n, i as f64 / 10.0, 1e-10).unwrap().value;
                assert!(v < 0.0 && v < prev, "n={n} alpha={}: {v}", i as f64 / 10.0);
                prev = v;
            }
        }
    }

    #[test]
    fn areal_functional_reference_values() {
        let prof = schwarzschild_profile(params(3, 2.0)).unwrap();
        let r = r_functional(&prof, 8.0, 1e-10).unwrap();
        assert_relative_eq!(r.value, -0.0029734391023634040, max_relative = 1e-9);
        assert_eq!(r.truncation_point, 8e6);
        let prof = schwarzschild_profile(params(4, 1.0)).unwrap();
        let r = r_functional(&prof, 3.0, 1e-10).unwrap();
        assert_relative_eq!(r.value, -0.0020340378134420078, max_relative = 1e-9);
        assert!(matches!(
            r_functional(&prof, prof.areal_horizon(), 1e-10),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn areal_error_estimate_is_honest() {
        for &(n, m, u0) in &[(3usize, 1.0, 2.2), (5, 2.0, 1.9), (7, 0.5, 1.2)] {
            let prof = schwarzschild_profile(params(n, m)).unwrap();
            let coarse = r_functional(&prof, u0, 1e-6).unwrap();
            let fine = r_functional(&prof, u0, 1e-7).unwrap();
            assert!((coarse.value - fine.value).abs() <= coarse.error_estimate);
        }
    }

    #[test]
    fn areal_scaling() {
        // R(λ^{n−2} m, λ u0) = R(m, u0) / λ
        for &(n, m, u0, lambda) in &[(3usize, 1.0, 3.0, 2.5), (4, 2.0, 2.5, 0.4), (6, 0.7, 1.3, 3.0)] {
            let base = r_functional(&schwarzschild_profile(params(n, m)).unwrap(), u0, 1e-11).unwrap();
            let scaled_params = params(n, m * f64::powi(lambda, n as i32 - 2));
            let scaled = r_functional(&schwarzschild_profile(scaled_params).unwrap(), lambda * u0, 1e-11).unwrap();
            assert_relative_eq!(scaled.value * lambda, base.value, max_relative = 1e-9);
        }
    }

    #[test]
    fn horizon_direct_integral_is_linear() {
        let p = params(3, 1.0);
        let r = ricci_integral_direct(&p, p.horizon_radius(), 5.0, 1e-10).unwrap();
        assert_relative_eq!(r.value, -0.625, max_relative = 1e-14);
        assert!(ricci_integral_direct(&p, p.horizon_radius(), f64::INFINITY, 1e-10).is_err());
    }

    #[test]
    fn direct_partials_stay_negative() {
        let p = params(3, 2.0);
        let di = ricci_integral_direct_with_partials(&p, 2.0, f64::INFINITY, 1e-10).unwrap();
        assert!(di.result.value < 0.0);
        assert!(di.partials.iter().skip(1).all(|pi| pi.value < 0.0));
        let short = ricci_integral_direct(&p, 2.0, 3.0, 1e-10).unwrap();
        assert!(short.value < 0.0);
        assert_eq!(short.truncation_point, 3.0);
    }

    #[test]
    fn series_terms_are_negative_and_dominated_by_first() {
        for &(n, m, u0) in &[(3usize, 2.0_f64, 4.5_f64), (4, 1.0, 2.0), (5, 0.5, 1.2), (7, 2.0, 1.5)] {
            let p = params(n, m);
            let nf = n as f64;
            let leading =
                (nf - 2.0).powi(2) * m * m / ((2.0 * nf - 2.0) * u0.powf(2.0 * nf - 3.0)) * wallis(2.0 * nf - 4.0);
            let mut prev = 0.0;
            for terms in 1..40 {
                let s = r_series_schwarzschild(&p, u0, terms).unwrap();
                assert!(s.value < prev);
                assert!(s.value.abs() >= leading * (1.0 - 1e-14));
                prev = s.value;
            }
            assert_relative_eq!(
                r_series_schwarzschild(&p, u0, 1).unwrap().value,
                -leading,
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn series_tail_bound_is_rigorous() {
        for &(n, m, u0) in &[(3usize, 1.0, 2.05), (4, 1.0, 1.5), (8, 2.0, 1.4)] {
            let p = params(n, m);
            let exact = r_series_converged(&p, u0, 1e-15).unwrap().value;
            for terms in [1usize, 2, 5, 20, 100] {
                let s = r_series_schwarzschild(&p, u0, terms).unwrap();
                let rounding = 8.0 * f64::EPSILON * exact.abs();
                assert!(
                    (exact - s.value).abs() <= s.tail_bound + rounding,
                    "n={n} terms={terms}"
                );
            }
        }
    }

    #[test]
    fn series_matches_areal_functional() {
        for &(n, m, u0) in &[(3usize, 1.0, 2.1), (5, 1.0, 1.5), (7, 0.5, 1.1)] {
            let p = params(n, m);
            let s = r_series_converged(&p, u0, 1e-12).unwrap();
            assert!(s.tail_bound < 1e-10 * s.value.abs().max(1.0));
            let r = r_functional(&schwarzschild_profile(p).unwrap(), u0, 1e-11).unwrap();
            assert!(relative_difference(s.value, r.value) < 1e-6);
        }
        let p = params(3, 2.0);
        assert!(r_series_schwarzschild(&p, 4.0, 5).is_err());
    }

    #[test]
    fn series_decays_with_leading_power() {
        for n in [3usize, 4, 6] {
            let p = params(n, 1.0);
            let u0 = 1e3f64.powf(1.0 / (n as f64 - 2.0)) * 2f64.powf(1.0 / (n as f64 - 2.0));
            let near = r_series_converged(&p, u0, 1e-14).unwrap().value;
            let far = r_series_converged(&p, 2.0 * u0, 1e-14).unwrap().value;
            let expected = 2f64.powf(-(2.0 * n as f64 - 3.0));
            assert_relative_eq!(far / near, expected, max_relative = 1e-2);
        }
    }

    #[test]
    fn wallis_examples() {
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
        assert_relative_eq!(wallis(0.0), FRAC_PI_2, max_relative = 1e-14);
        assert_relative_eq!(wallis(2.0), FRAC_PI_4, max_relative = 1e-14);
        assert_relative_eq!(wallis(3.0), 2.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn three_routes_agree() {
        // reference values from an independent high-precision evaluation
        let cases: [(usize, f64, f64, f64); 4] = [
            (3, 1.0, 1.01, -1.4861912126413010),
            (5, 0.5, 1.01, -4.0691190158218792),
            (7, 2.0, 10.0, -3.2213302420360258e-11),
            (4, 1.0, 2.0, -0.054069435934485383),
        ];
        for &(n, m, factor, expected) in &cases {
            let p = params(n, m);
            let c = compare_routes(&p, factor * p.horizon_radius(), 1e-10).unwrap();
            assert!(c.negative);
            assert!(c.ode_reldiff < 1e-3);
            assert!(c.quadrature_series_reldiff < 1e-6);
            assert_relative_eq!(c.series.unwrap(), expected, max_relative = 1e-9);
            assert_relative_eq!(c.alpha_form.unwrap(), expected, max_relative = 1e-9);
        }
    }

    #[test]
    fn alpha_parameter_from_start() {
        let p = params(3, 1.0);
        let a = AlphaParameter::from_start(&p, p.horizon_radius()).unwrap();
        assert_eq!(a.alpha, 1.0);
        assert_eq!(a.complement, 0.0);
        let a = AlphaParameter::from_start(&p, 1.01 * p.horizon_radius()).unwrap();
        assert_relative_eq!(a.alpha, 0.99997524813742234, max_relative = 1e-15);
        assert_relative_eq!(a.complement, 1.0 - 0.99997524813742234, max_relative = 1e-9);
        assert!(a.alpha < 1.0);
    }
}
