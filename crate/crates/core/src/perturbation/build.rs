//! The metric `e^{2φ_f} g_flat` reconstructed from a profile function.
//!
//! With `h(u) = R_f exp(∫_{C_f}^u dx/(x f(x)))` and `u(h)` its inverse,
//! `φ_f(h) = log(u(h)/h)`. Inside the horizon the exponent is continued
//! by the inversion symmetry `φ(r) = φ(R_f²/r) + 2 log(R_f/r)`.

use std::sync::Arc;

use crate::conformal_metric::{ConformalExponent, MetricProfile};
use crate::error::{Error, Result};
use crate::numerics::grid::log_space;
use crate::numerics::quadrature::integrate_relative;
use crate::numerics::roots::invert_increasing;
use crate::scalar::Real;

use super::profile_fn::ProfileFunction;

/// Relative tolerance of every piece of `∫ dx/(x f)`.
const LOG_INTEGRAL_TOL: f64 = 1e-13;
/// Knots in `w = sqrt(u − C_f)` span `sqrt(C_f)·[1e−6, 1e8]`.
const KNOT_RANGE: (f64, f64) = (1e-6, 1e8);
const KNOT_COUNT: usize = 281;

struct BuiltExponent<T: Real> {
    pf: ProfileFunction<T>,
    r_f: T,
    c_f: T,
    /// `w` knots starting at 0 and the cumulative log integral at each.
    knots_w: Vec<T>,
    knots_i: Vec<T>,
}

impl<T: Real> BuiltExponent<T> {
    fn new(pf: ProfileFunction<T>, r_f: T) -> Result<Self> {
        let c_f = pf.c_f();
        let root_c = c_f.sqrt();
        let mut knots_w = vec![T::zero()];
        knots_w.extend(log_space(
            root_c * T::lit(KNOT_RANGE.0),
            root_c * T::lit(KNOT_RANGE.1),
            KNOT_COUNT,
        ));
        let mut knots_i = Vec::with_capacity(knots_w.len());
        let mut acc = T::zero();
        knots_i.push(acc);
        for pair in knots_w.windows(2) {
            let piece = integrate_relative(|w| pf.w_integrand(w), pair[0], pair[1], T::lit(LOG_INTEGRAL_TOL))
                .map_err(|e| Error::Profile(format!("1/(u f(u)) is not integrable: {e}")))?;
            if !(piece.value > T::zero()) {
                return Err(Error::Profile("h(u) must increase strictly".into()));
            }
            acc = acc + piece.value;
            knots_i.push(acc);
        }
        Ok(Self {
            pf,
            r_f,
            c_f,
            knots_w,
            knots_i,
        })
    }

    fn last_knot(&self) -> (T, T) {
        let w = *self.knots_w.last().expect("knots");
        (self.c_f + w * w, *self.knots_i.last().expect("knots"))
    }

    /// `∫_{C_f}^{C_f + w²} dx/(x f)` for `w` inside the knot range.
    fn log_integral_w(&self, w: T) -> T {
        let k = self.knots_w.partition_point(|&x| x <= w).saturating_sub(1);
        let start = self.knots_w[k];
        if w == start {
            return self.knots_i[k];
        }
        let piece = integrate_relative(|x| self.pf.w_integrand(x), start, w, T::lit(LOG_INTEGRAL_TOL))
            .map(|i| i.value)
            .unwrap_or_else(|_| T::nan());
        self.knots_i[k] + piece
    }

    fn log_integral(&self, u: T) -> T {
        if u <= self.c_f {
            return T::zero();
        }
        let (u_max, i_max) = self.last_knot();
        if u >= u_max {
            // f = 1 to working precision this far out
            return i_max + (u / u_max).ln();
        }
        self.log_integral_w((u - self.c_f).sqrt())
    }

    fn h(&self, u: T) -> T {
        self.r_f * self.log_integral(u).exp()
    }

    /// `u(h)` for `h ≥ R_f`.
    fn areal_of_radius(&self, r: T) -> T {
        let target = (r / self.r_f).ln();
        if !(target > T::zero()) {
            return self.c_f;
        }
        let (u_max, i_max) = self.last_knot();
        if target >= i_max {
            return u_max * (target - i_max).exp();
        }
        let k = self.knots_i.partition_point(|&v| v <= target).saturating_sub(1);
        let k = k.min(self.knots_w.len() - 2);
        let w = invert_increasing(
            |w| (self.log_integral_w(w), self.pf.w_integrand(w)),
            target,
            self.knots_w[k],
            self.knots_w[k + 1],
            T::lit(4.0) * T::epsilon(),
        )
        .unwrap_or_else(|_| T::nan());
        self.c_f + w * w
    }

    /// `(φ, φ', φ'')` at `r ≥ R_f`.
    fn outside(&self, r: T) -> (T, T, T) {
        let u = self.areal_of_radius(r);
        let p = self.pf.point(u);
        let phi = (u / r).ln();
        let d1 = -p.deficit / r;
        let d2 = (u * p.value_times_derivative + p.deficit) / (r * r);
        (phi, d1, d2)
    }

    fn jet(&self, r: T) -> (T, T, T) {
        if r >= self.r_f {
            return self.outside(r);
        }
        let big2 = self.r_f * self.r_f;
        let mirror = big2 / r;
        let (phi, d1, d2) = self.outside(mirror);
        let two = T::lit(2.0);
        let r2 = r * r;
        (
            phi + two * (self.r_f / r).ln(),
            -d1 * big2 / r2 - two / r,
            d2 * big2 * big2 / (r2 * r2) + two * d1 * big2 / (r2 * r) + two / r2,
        )
    }
}

impl<T: Real> ConformalExponent<T> for BuiltExponent<T> {
    fn phi(&self, r: T) -> T {
        self.jet(r).0
    }

    fn dphi(&self, r: T) -> T {
        self.jet(r).1
    }

    fn d2phi(&self, r: T) -> T {
        self.jet(r).2
    }

    fn radius_of_areal(&self, u: T) -> Option<Result<T>> {
        Some(Ok(self.h(u)))
    }
}

/// Builds the rotationally symmetric metric with horizon radius `R_f` whose
/// profile function is `pf`.
pub fn build_metric_from_f<T: Real>(pf: &ProfileFunction<T>, r_f: T) -> Result<MetricProfile<T>> {
    if !(r_f > T::zero()) || !r_f.is_finite() {
        return Err(Error::Parameter("R_f must be positive and finite".into()));
    }
    pf.validate()?;
    let exponent = BuiltExponent::new(pf.clone(), r_f)?;
    MetricProfile::from_exponent(pf.n(), r_f, Arc::new(exponent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal_metric::{schwarzschild_profile, SchwarzschildParams};
    use crate::perturbation::smoothed_bump::smoothed_bump_profile;
    use approx::assert_relative_eq;

    #[test]
    fn schwarzschild_roundtrip() {
        for &(n, m) in &[(3usize, 1.0_f64), (4, 2.0), (6, 0.5)] {
            let params = SchwarzschildParams::schwarzschild(n, m).unwrap();
            let exact = schwarzschild_profile(params).unwrap();
            let pf = ProfileFunction::schwarzschild(n, m).unwrap();
            let built = build_metric_from_f(&pf, params.horizon_radius()).unwrap();
            assert_relative_eq!(built.horizon_radius(), params.horizon_radius(), max_relative = 1e-12);
            assert_relative_eq!(built.areal_horizon(), params.areal_horizon(), max_relative = 1e-12);
            let big = params.horizon_radius();
            for r in log_space(big, 100.0 * big, 97) {
                assert!((built.phi(r) - exact.phi(r)).abs() < 1e-8, "n={n} r={r}");
                assert_relative_eq!(built.dphi(r), exact.dphi(r), max_relative = 1e-7);
            }
            for r in log_space(big / 10.0, big, 17) {
                assert!((built.phi(r) - exact.phi(r)).abs() < 1e-8, "n={n} r={r}");
            }
        }
    }

    #[test]
    fn built_profile_recovers_f() {
        let pf = smoothed_bump_profile(1.0_f64, 0.01).unwrap();
        let built = build_metric_from_f(&pf, 0.5).unwrap();
        assert_relative_eq!(built.horizon_radius(), 0.5, max_relative = 1e-12);
        for u in log_space(2.0, 2e3, 301) {
            let f = built.f_phi(u).unwrap();
            assert!((f - pf.f(u)).abs() < 1e-8, "u={u}: {f} vs {}", pf.f(u));
        }
        let diag = built.diagnostics();
        assert!(diag.inversion_residual < 1e-10, "{diag:?}");
        assert!(diag.min_radial_growth > 0.0);
    }

    #[test]
    fn rejects_bad_radius() {
        let pf = ProfileFunction::schwarzschild(3, 1.0_f64).unwrap();
        assert!(build_metric_from_f(&pf, 0.0).is_err());
    }
}
