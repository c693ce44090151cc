//! Rotationally symmetric conformally flat metrics `e^{2φ(|x|)} g_flat`.
//!
//! A [`MetricProfile`] bundles the conformal exponent φ and its first two
//! radial derivatives with the horizon data. Exact Schwarzschild metrics and
//! their generalized `k`-analogues are built by [`schwarzschild_profile`];
//! profiles reconstructed from a profile function live in
//! [`crate::perturbation`].

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::grid::{log_space, CHECK_GRID_POINTS};
use crate::numerics::roots::{grow_upper_bracket, invert_increasing};
use crate::scalar::Real;

/// Dimension, ADM mass and generalization exponent of a Schwarzschild-type
/// metric `(1 + m / (2|x|^{(n-2k)/k}))^{4k/(n-2k)} g_flat`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchwarzschildParams<T> {
    n: usize,
    m: T,
    k: usize,
}

impl<T: Real> SchwarzschildParams<T> {
    pub fn new(n: usize, m: T, k: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Parameter(format!("dimension n = {n} must be at least 3")));
        }
        if !(m > T::zero()) || !m.is_finite() {
            return Err(Error::Parameter(format!("mass m = {} must be positive", m.as_f64())));
        }
        if k < 1 {
            return Err(Error::Parameter("exponent k must be at least 1".into()));
        }
        if n <= 2 * k {
            return Err(Error::Parameter(format!("need n > 2k, got n = {n}, k = {k}")));
        }
        Ok(Self { n, m, k })
    }

    /// The classical Schwarzschild metric (`k = 1`).
    pub fn schwarzschild(n: usize, m: T) -> Result<Self> {
        Self::new(n, m, 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> T {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Radial power `(n - 2k) / k`; equals `n - 2` for Schwarzschild.
    pub fn power(&self) -> T {
        T::of(self.n - 2 * self.k) / T::of(self.k)
    }

    /// `1 + m / (2 r^p)`.
    pub fn conformal_base(&self, r: T) -> T {
        T::one() + self.m / (T::lit(2.0) * r.powf(self.power()))
    }

    /// Euclidean horizon radius `(m/2)^{1/p}`.
    pub fn horizon_radius(&self) -> T {
        (self.m * T::lit(0.5)).powf(self.power().recip())
    }

    /// Areal horizon value `(2m)^{1/p}`.
    pub fn areal_horizon(&self) -> T {
        (self.m * T::lit(2.0)).powf(self.power().recip())
    }

    /// `f_{n,m}(u) = sqrt(1 - 2m / u^p)`, the closed-form profile function.
    pub fn profile_function(&self, u: T) -> T {
        (T::one() - T::lit(2.0) * self.m / u.powf(self.power()))
            .max(T::zero())
            .sqrt()
    }

    pub(crate) fn require_classic(&self, what: &str) -> Result<()> {
        if self.k == 1 {
            Ok(())
        } else {
            Err(Error::Parameter(format!(
                "{what} is only defined for k = 1 (got k = {})",
                self.k
            )))
        }
    }
}

/// Conformal exponent φ(r) with analytic first and second derivatives.
pub trait ConformalExponent<T>: Send + Sync {
    fn phi(&self, r: T) -> T;
    fn dphi(&self, r: T) -> T;
    fn d2phi(&self, r: T) -> T;

    /// Direct inverse of `u(r) = r e^{φ(r)}` when the construction provides
    /// one; otherwise the areal coordinate inverts `u` numerically.
    fn radius_of_areal(&self, _u: T) -> Option<Result<T>> {
        None
    }
}

#[derive(Debug, Clone, Copy)]
struct SchwarzschildExponent<T> {
    params: SchwarzschildParams<T>,
}

impl<T: Real> ConformalExponent<T> for SchwarzschildExponent<T> {
    fn phi(&self, r: T) -> T {
        T::lit(2.0) / self.params.power() * self.params.conformal_base(r).ln()
    }

    fn dphi(&self, r: T) -> T {
        let p = self.params.power();
        -(self.params.m / r.powf(p + T::one())) / self.params.conformal_base(r)
    }

    fn d2phi(&self, r: T) -> T {
        let p = self.params.power();
        let base = self.params.conformal_base(r);
        let q = base - T::one();
        self.params.m / (r.powf(p + T::lit(2.0)) * base) * ((p + T::one()) - p * q / base)
    }
}

/// A rotationally symmetric metric `e^{2φ(r)} g_flat` with horizon data.
#[derive(Clone)]
pub struct MetricProfile<T> {
    n: usize,
    horizon_radius: T,
    areal_horizon: T,
    exponent: Arc<dyn ConformalExponent<T>>,
    schwarzschild: Option<SchwarzschildParams<T>>,
}

impl<T: Real> fmt::Debug for MetricProfile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricProfile")
            .field("n", &self.n)
            .field("horizon_radius", &self.horizon_radius)
            .field("areal_horizon", &self.areal_horizon)
            .field("schwarzschild", &self.schwarzschild)
            .finish()
    }
}

/// Worst-case residuals of the structural conditions on sampling grids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileDiagnostics<T> {
    /// max |e^{φ(R²/r)} R²/r − e^{φ(r)} r| over `r ∈ [R/10, 10R]`.
    pub inversion_residual: T,
    /// min of `1 + r φ'(r)` over `r ∈ (R, 10⁶R]`.
    pub min_radial_growth: T,
    /// max relative disagreement of `dphi` with centered differences of `phi`.
    pub dphi_fd_error: T,
    /// max relative disagreement of `d2phi` with centered differences of `dphi`.
    pub d2phi_fd_error: T,
}

impl<T: Real> MetricProfile<T> {
    /// Wraps an exponent; the areal horizon is `R e^{φ(R)}`.
    pub fn from_exponent(n: usize, horizon_radius: T, exponent: Arc<dyn ConformalExponent<T>>) -> Result<Self> {
        if n < 3 {
            return Err(Error::Parameter(format!("dimension n = {n} must be at least 3")));
        }
        if !(horizon_radius > T::zero()) {
            return Err(Error::Profile("horizon radius must be positive".into()));
        }
        let areal_horizon = horizon_radius * exponent.phi(horizon_radius).exp();
        if !areal_horizon.is_finite() {
            return Err(Error::Profile("φ is not finite at the horizon".into()));
        }
        Ok(Self {
            n,
            horizon_radius,
            areal_horizon,
            exponent,
            schwarzschild: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `R_φ`.
    pub fn horizon_radius(&self) -> T {
        self.horizon_radius
    }

    /// `C_φ = R_φ e^{φ(R_φ)}`.
    pub fn areal_horizon(&self) -> T {
        self.areal_horizon
    }

    /// Parameters when this is an exact Schwarzschild-type profile.
    pub fn schwarzschild_params(&self) -> Option<&SchwarzschildParams<T>> {
        self.schwarzschild.as_ref()
    }

    pub fn phi(&self, r: T) -> T {
        self.exponent.phi(r)
    }

    pub fn dphi(&self, r: T) -> T {
        self.exponent.dphi(r)
    }

    pub fn d2phi(&self, r: T) -> T {
        self.exponent.d2phi(r)
    }

    /// `u(r) = r e^{φ(r)}`.
    pub fn areal(&self, r: T) -> T {
        r * self.phi(r).exp()
    }

    /// `du/dr = e^{φ}(1 + r φ')`.
    pub fn areal_derivative(&self, r: T) -> T {
        self.phi(r).exp() * (T::one() + r * self.dphi(r))
    }

    /// Condition (a) at a single radius.
    pub fn inversion_residual(&self, r: T) -> T {
        let mirror = self.horizon_radius * self.horizon_radius / r;
        (self.areal(mirror) - self.areal(r)).abs()
    }

    /// Inverse of the areal coordinate for `u ≥ C_φ`.
    pub fn radius_of_areal(&self, u: T) -> Result<T> {
        let c = self.areal_horizon;
        if u < c * (T::one() - T::lit(8.0) * T::epsilon()) || u.is_nan() {
            return Err(Error::Domain(format!(
                "areal value u = {:e} lies below C_φ = {:e}",
                u.as_f64(),
                c.as_f64()
            )));
        }
        if let Some(direct) = self.exponent.radius_of_areal(u) {
            return direct;
        }
        let lo = self.horizon_radius;
        if u <= self.areal(lo) {
            return Ok(lo);
        }
        let hi = if self.areal(u) >= u {
            u
        } else {
            grow_upper_bracket(|r| self.areal(r), u, u, T::lit(2.0))?
        };
        invert_increasing(
            |r| (self.areal(r), self.areal_derivative(r)),
            u,
            lo,
            hi,
            T::lit(4.0) * T::epsilon(),
        )
    }

    /// `f_φ(u) = 1 + r(u) φ'(r(u))`.
    pub fn f_phi(&self, u: T) -> Result<T> {
        let r = self.radius_of_areal(u)?;
        Ok(T::one() + r * self.dphi(r))
    }

    /// `1 − f_φ(u) = −r(u) φ'(r(u))`, free of cancellation at large `u`.
    pub fn f_phi_deficit(&self, u: T) -> Result<T> {
        let r = self.radius_of_areal(u)?;
        Ok(-r * self.dphi(r))
    }

    /// `d f_φ / du = (φ' + r φ'') / (e^{φ} (1 + r φ'))` at `r = r(u)`.
    pub fn f_phi_derivative(&self, u: T) -> Result<T> {
        let r = self.radius_of_areal(u)?;
        let d1 = self.dphi(r);
        Ok((d1 + r * self.d2phi(r)) / (self.phi(r).exp() * (T::one() + r * d1)))
    }

    /// `f_φ · f_φ'` expressed without the `1/(1 + rφ')` factor, finite at the horizon.
    pub fn f_phi_times_derivative(&self, u: T) -> Result<T> {
        let r = self.radius_of_areal(u)?;
        Ok((self.dphi(r) + r * self.d2phi(r)) / self.phi(r).exp())
    }

    /// Structural condition residuals on log-spaced grids of 512 points.
    pub fn diagnostics(&self) -> ProfileDiagnostics<T> {
        let big = self.horizon_radius;
        let ten = T::lit(10.0);
        let inversion_residual = log_space(big / ten, big * ten, CHECK_GRID_POINTS)
            .into_iter()
            .map(|r| self.inversion_residual(r))
            .fold(T::zero(), T::max);

        let min_radial_growth = log_space(big, big * T::lit(1e6), CHECK_GRID_POINTS + 1)
            .into_iter()
            .skip(1)
            .map(|r| T::one() + r * self.dphi(r))
            .fold(T::infinity(), T::min);

        let mut dphi_fd_error = T::zero();
        let mut d2phi_fd_error = T::zero();
        for r in log_space(big * T::lit(1.01), big * T::lit(100.0), 64) {
            let h1 = r * T::lit(1e-5);
            let fd1 = (self.phi(r + h1) - self.phi(r - h1)) / (T::lit(2.0) * h1);
            let d1 = self.dphi(r);
            dphi_fd_error = dphi_fd_error.max((fd1 - d1).abs() / (d1.abs() + T::min_positive_value()));
            let fd2 = (self.dphi(r + h1) - self.dphi(r - h1)) / (T::lit(2.0) * h1);
            let d2 = self.d2phi(r);
            let scale = d2.abs() + d1.abs() / r + T::min_positive_value();
            d2phi_fd_error = d2phi_fd_error.max((fd2 - d2).abs() / scale);
        }

        ProfileDiagnostics {
            inversion_residual,
            min_radial_growth,
            dphi_fd_error,
            d2phi_fd_error,
        }
    }
}

/// The exact profile `φ(r) = (2k/(n−2k)) log(1 + m/(2 r^{(n−2k)/k}))`.
pub fn schwarzschild_profile<T: Real>(params: SchwarzschildParams<T>) -> Result<MetricProfile<T>> {
    let mut profile = MetricProfile::from_exponent(
        params.n(),
        params.horizon_radius(),
        Arc::new(SchwarzschildExponent { params }),
    )?;
    profile.schwarzschild = Some(params);
    Ok(profile)
}

fn norm<T: Real>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt()
}

fn check_point<T: Real>(params: &SchwarzschildParams<T>, x: &[T]) -> Result<T> {
    params.require_classic("the inversion isometry")?;
    if x.len() != params.n() {
        return Err(Error::Parameter(format!(
            "point has {} components, expected n = {}",
            x.len(),
            params.n()
        )));
    }
    let r = norm(x);
    if r == T::zero() {
        return Err(Error::Domain("the inversion is undefined at the origin".into()));
    }
    Ok(r)
}

/// Inversion `I(x) = (m/2)^{2/(n−2)} x / |x|²` through the horizon sphere.
pub fn inversion_map<T: Real>(params: &SchwarzschildParams<T>, x: &[T]) -> Result<Vec<T>> {
    let r = check_point(params, x)?;
    let scale = params.horizon_radius().powi(2) / (r * r);
    Ok(x.iter().map(|&v| v * scale).collect())
}

/// `|(1+m/(2|I(x)|^{n−2}))^{4/(n−2)} (m/2)^{4/(n−2)} / |x|⁴ − (1+m/(2|x|^{n−2}))^{4/(n−2)}|`.
pub fn inversion_identity_residual<T: Real>(params: &SchwarzschildParams<T>, x: &[T]) -> Result<T> {
    let r = check_point(params, x)?;
    let image = inversion_map(params, x)?;
    let p = params.power();
    let e = T::lit(4.0) / p;
    let pulled = params.conformal_base(norm(&image)).powf(e) * (params.m() * T::lit(0.5)).powf(e) / r.powi(4);
    let direct = params.conformal_base(r).powf(e);
    Ok((pulled - direct).abs())
}

/// Areal radius `u = r e^{φ(r)}` together with its inverse.
#[derive(Clone)]
pub struct ArealCoordinate<T> {
    profile: MetricProfile<T>,
}

impl<T: Real> fmt::Debug for ArealCoordinate<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ArealCoordinate")
            .field("profile", &self.profile)
            .finish()
    }
}

impl<T: Real> ArealCoordinate<T> {
    pub fn u(&self, r: T) -> T {
        self.profile.areal(r)
    }

    pub fn r_of_u(&self, u: T) -> Result<T> {
        self.profile.radius_of_areal(u)
    }

    pub fn profile(&self) -> &MetricProfile<T> {
        &self.profile
    }
}

/// Builds the areal coordinate after checking that `u(r)` increases on a
/// log grid over `[R_φ, 10⁶R_φ]`.
pub fn areal_coordinate<T: Real>(profile: &MetricProfile<T>) -> Result<ArealCoordinate<T>> {
    let big = profile.horizon_radius();
    let grid = log_space(big, big * T::lit(1e6), CHECK_GRID_POINTS);
    let mut prev = profile.areal(grid[0]);
    for &r in &grid[1..] {
        let u = profile.areal(r);
        if !(u > prev) {
            return Err(Error::Profile(format!(
                "areal coordinate is not increasing near r = {:e}",
                r.as_f64()
            )));
        }
        prev = u;
    }
    Ok(ArealCoordinate {
        profile: profile.clone(),
    })
}

/// `f_φ(u) = 1 + r(u) φ'(r(u))` for `u ≥ C_φ`.
pub fn f_phi<T: Real>(profile: &MetricProfile<T>, u: T) -> Result<T> {
    profile.f_phi(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sch(n: usize, m: f64) -> MetricProfile<f64> {
        schwarzschild_profile(SchwarzschildParams::schwarzschild(n, m).unwrap()).unwrap()
    }

    #[test]
    fn horizon_data_for_unit_horizon() {
        let p = sch(3, 2.0);
        assert_relative_eq!(p.horizon_radius(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(p.areal_horizon(), 4.0, max_relative = 1e-15);
    }

    #[test]
    fn parameter_validation() {
        assert!(SchwarzschildParams::new(4, 2.0, 2).is_err());
        assert!(SchwarzschildParams::new(2, 1.0, 1).is_err());
        assert!(SchwarzschildParams::new(3, 0.0, 1).is_err());
        assert!(SchwarzschildParams::new(3, -1.0, 1).is_err());
        assert!(SchwarzschildParams::new(5, 1.0, 2).is_ok());
    }

    #[test]
    fn generalized_horizon_radius() {
        let p = SchwarzschildParams::new(5, 2.0_f64, 2).unwrap();
        // (m/2)^{k/(n-2k)} = 1^{2}
        assert_relative_eq!(p.horizon_radius(), 1.0);
        let p = SchwarzschildParams::new(7, 4.0_f64, 3).unwrap();
        assert_relative_eq!(p.horizon_radius(), 2f64.powf(3.0), max_relative = 1e-14);
    }

    #[test]
    fn inversion_examples() {
        let p = SchwarzschildParams::schwarzschild(3, 2.0_f64).unwrap();
        let on_sphere = [0.6, 0.8, 0.0];
        let img = inversion_map(&p, &on_sphere).unwrap();
        for (a, b) in img.iter().zip(&on_sphere) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(inversion_map(&p, &[2.0, 0.0, 0.0]).unwrap(), vec![0.5, 0.0, 0.0]);
        assert_eq!(inversion_map(&p, &[0.5, 0.0, 0.0]).unwrap(), vec![2.0, 0.0, 0.0]);
        assert!(matches!(inversion_map(&p, &[0.0, 0.0, 0.0]), Err(Error::Domain(_))));
        assert!(inversion_map(&p, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn inversion_identity_examples() {
        let p3 = SchwarzschildParams::schwarzschild(3, 2.0_f64).unwrap();
        assert!(inversion_identity_residual(&p3, &[3.0, 0.0, 0.0]).unwrap() < 1e-12);
        assert_eq!(inversion_identity_residual(&p3, &[1.0, 0.0, 0.0]).unwrap(), 0.0);
        let p5 = SchwarzschildParams::schwarzschild(5, 1.0_f64).unwrap();
        assert!(inversion_identity_residual(&p5, &[1.0; 5]).unwrap() < 1e-12);
        assert!(inversion_identity_residual(&p5, &[0.0; 5]).is_err());
    }

    #[test]
    fn areal_coordinate_examples() {
        let p = sch(3, 2.0);
        let a = areal_coordinate(&p).unwrap();
        assert_relative_eq!(a.u(1.0), 4.0, max_relative = 1e-15);
        assert_relative_eq!(a.r_of_u(a.u(5.0)).unwrap(), 5.0, max_relative = 1e-12);
        // independent evaluation of the asymptotic ratio (1 + m/(2r))^2
        let r: f64 = 1e6;
        let direct = (1.0 + 2.0 / (2.0 * r)).powi(2);
        assert_relative_eq!(a.u(r) / r, direct, max_relative = 1e-14);
        assert!((a.u(r) / r - 1.0).abs() < 1e-4);
        assert!(a.r_of_u(3.0).is_err());
    }

    #[test]
    fn f_phi_matches_closed_form() {
        for &(n, m) in &[(3usize, 2.0_f64), (4, 1.0), (5, 0.5), (7, 2.0)] {
            let prof = sch(n, m);
            let params = SchwarzschildParams::schwarzschild(n, m).unwrap();
            let c = prof.areal_horizon();
            for u in log_space(c, 100.0 * c, 200) {
                let got = prof.f_phi(u).unwrap();
                assert!((got - params.profile_function(u)).abs() < 1e-10, "n={n} m={m} u={u}");
            }
        }
        let p = sch(3, 2.0);
        assert!(p.f_phi(4.0).unwrap().abs() < 1e-12);
        assert!((p.f_phi(1e8).unwrap() - 1.0).abs() < 1e-7);
        assert!(matches!(p.f_phi(3.9), Err(Error::Domain(_))));
    }

    #[test]
    fn diagnostics_of_exact_profiles() {
        for &(n, m, k) in &[(3usize, 2.0_f64, 1usize), (4, 1.0, 1), (5, 1.0, 2), (7, 2.0, 3)] {
            let prof = schwarzschild_profile(SchwarzschildParams::new(n, m, k).unwrap()).unwrap();
            let d = prof.diagnostics();
            assert!(d.inversion_residual < 1e-9, "{d:?}");
            assert!(d.min_radial_growth > 0.0, "{d:?}");
            assert!(d.dphi_fd_error < 1e-6, "{d:?}");
            assert!(d.d2phi_fd_error < 1e-6, "{d:?}");
        }
    }

    #[test]
    fn single_precision_profile() {
        let p = schwarzschild_profile(SchwarzschildParams::schwarzschild(3, 2.0_f32).unwrap()).unwrap();
        assert!((p.areal_horizon() - 4.0).abs() < 1e-5);
        let f = p.f_phi(9.0).unwrap();
        assert!((f - (1.0f32 - 4.0 / 9.0).sqrt()).abs() < 1e-5);
    }
}
