//! Sufficient conditions for `R(φ, u₀) < 0` on perturbed Schwarzschild
//! profiles, checked on a grid, plus the scalar-curvature sign scan.

use serde::Serialize;

use crate::conformal_metric::{MetricProfile, SchwarzschildParams};
use crate::curvature::scalar_curvature_u_form;
use crate::error::{Error, Result};
use crate::frankel::r_functional;
use crate::numerics::grid::log_space;
use crate::scalar::Real;

/// Bounds `a`, `b` on how far the profile may move from Schwarzschild.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbationBudget<T> {
    pub a: T,
    pub b: T,
    pub n: usize,
    pub m: T,
}

impl<T: Real> PerturbationBudget<T> {
    pub fn new(a: T, b: T, n: usize, m: T) -> Result<Self> {
        if !(a >= T::zero()) || !(b >= T::zero()) {
            return Err(Error::Parameter("budgets a and b must be non-negative".into()));
        }
        if n < 3 {
            return Err(Error::Parameter(format!("dimension n = {n} must be at least 3")));
        }
        if !(m > T::zero()) {
            return Err(Error::Parameter("mass m must be positive".into()));
        }
        Ok(Self { a, b, n, m })
    }

    /// `(3n−4)a + (2n−3)(n−2)b`.
    pub fn lhs(&self) -> T {
        let n = T::of(self.n);
        (T::lit(3.0) * n - T::lit(4.0)) * self.a + (T::lit(2.0) * n - T::lit(3.0)) * (n - T::lit(2.0)) * self.b
    }

    /// `(n−2)² m²`.
    pub fn rhs(&self) -> T {
        let d = T::of(self.n) - T::lit(2.0);
        d * d * self.m * self.m
    }

    pub fn holds(&self) -> bool {
        self.lhs() < self.rhs()
    }
}

/// Where the conditions and the functional are sampled.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionGrid<T> {
    /// Log-spaced points on `(C_φ, span·C_φ]`; the left end is excluded.
    pub points: usize,
    pub span: T,
    /// `u₀` values at which `R(φ, u₀)` is evaluated.
    pub r_samples: Vec<T>,
    pub tol: T,
}

impl<T: Real> ConditionGrid<T> {
    /// 2048 points over four decades and no `R` samples.
    pub fn standard() -> Self {
        Self {
            points: 2048,
            span: T::lit(1e4),
            r_samples: Vec::new(),
            tol: T::lit(1e-10),
        }
    }

    pub fn with_r_samples(mut self, samples: Vec<T>) -> Self {
        self.r_samples = samples;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationReport<T> {
    pub budget: PerturbationBudget<T>,
    /// min over the grid of `a/u^{2n−4} − (u f_φ' − u f_{n,m}')`.
    pub derivative_margin: T,
    /// min over the grid of `B(f_φ) − B(f_{n,m}) + b/u^{2n−4}`.
    pub b_margin: T,
    pub budget_lhs: T,
    pub budget_rhs: T,
    /// `(u₀, R(φ, u₀))`.
    pub r_samples: Vec<(T, T)>,
    pub grid_points: usize,
    pub grid_span: T,
    pub passed: bool,
}

impl<T: Real> PerturbationReport<T> {
    /// The conclusion the conditions are meant to guarantee.
    pub fn all_r_negative(&self) -> bool {
        self.r_samples.iter().all(|&(_, v)| v < T::zero())
    }
}

/// `B(x) − B(y)` for `B(x) = 1/x − x`, as `(y − x)(1 + 1/(xy))`.
fn b_difference<T: Real>(x: T, y: T) -> T {
    (y - x) * (T::one() + T::one() / (x * y))
}

/// Evaluates the hypotheses of the negativity criterion for `profile`
/// against the Schwarzschild profile of `params` and samples `R(φ, u₀)`.
pub fn check_negativity_conditions<T: Real>(
    profile: &MetricProfile<T>,
    params: &SchwarzschildParams<T>,
    budget: &PerturbationBudget<T>,
    grid: &ConditionGrid<T>,
) -> Result<PerturbationReport<T>> {
    params.require_classic("the perturbation criterion")?;
    if profile.n() != params.n() || budget.n != params.n() {
        return Err(Error::Parameter("profile, parameters and budget must share n".into()));
    }
    if budget.m != params.m() {
        return Err(Error::Parameter("budget and parameters must share m".into()));
    }
    let c_phi = profile.areal_horizon();
    let c_ref = params.areal_horizon();
    if c_phi < c_ref * (T::one() - T::lit(1e-12)) {
        return Err(Error::Hypothesis(format!(
            "C_φ = {:e} is below (2m)^(1/(n-2)) = {:e}",
            c_phi.as_f64(),
            c_ref.as_f64()
        )));
    }
    if grid.points < 2 || !(grid.span > T::one()) {
        return Err(Error::Parameter(
            "condition grid needs at least two points and span > 1".into(),
        ));
    }

    let d = params.power();
    let power = T::lit(2.0) * d;
    let m = params.m();
    let mut margin_deriv = T::infinity();
    let mut margin_b = T::infinity();
    for u in log_space(c_phi, c_phi * grid.span, grid.points + 1).into_iter().skip(1) {
        let f = profile.f_phi(u)?;
        let df = profile.f_phi_derivative(u)?;
        let f_ref = params.profile_function(u);
        // u f_{n,m}' = (n−2) m u^{−(n−2)} / f_{n,m}
        let u_df_ref = d * m * u.powf(-d) / f_ref;
        let weight = u.powf(-power);
        margin_deriv = margin_deriv.min(budget.a * weight - (u * df - u_df_ref));
        margin_b = margin_b.min(b_difference(f, f_ref) + budget.b * weight);
    }

    let mut r_samples = Vec::with_capacity(grid.r_samples.len());
    for &u0 in &grid.r_samples {
        r_samples.push((u0, r_functional(profile, u0, grid.tol)?.value));
    }

    let budget_lhs = budget.lhs();
    let budget_rhs = budget.rhs();
    let passed = margin_deriv >= T::zero() && margin_b >= T::zero() && budget_lhs < budget_rhs;
    Ok(PerturbationReport {
        budget: *budget,
        derivative_margin: margin_deriv,
        b_margin: margin_b,
        budget_lhs,
        budget_rhs,
        r_samples,
        grid_points: grid.points,
        grid_span: grid.span,
        passed,
    })
}

/// Scalar curvature at one scan point; `sign` is 0 inside the noise band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignSample<T> {
    pub u: T,
    pub value: T,
    pub sign: i8,
}

/// Values with `|Scal| ≤ SIGN_NOISE·2/u²` count as zero; `2/u²` is the size
/// of the individual terms that cancel in the scalar curvature.
pub const SIGN_NOISE: f64 = 1e-9;

/// Scalar curvature of a three-dimensional profile at `samples` evenly
/// spaced points of `[lo, hi]`.
pub fn scalar_sign_scan<T: Real>(
    profile: &MetricProfile<T>,
    lo: T,
    hi: T,
    samples: usize,
) -> Result<Vec<SignSample<T>>> {
    if profile.n() != 3 {
        return Err(Error::UnsupportedDimension(profile.n()));
    }
    if samples < 2 || !(hi > lo) {
        return Err(Error::Parameter("scan needs lo < hi and at least two samples".into()));
    }
    let last = T::of(samples - 1);
    (0..samples)
        .map(|i| {
            let u = lo + (hi - lo) * T::of(i) / last;
            let value = scalar_curvature_u_form(profile, u)?;
            let band = T::lit(SIGN_NOISE) * T::lit(2.0) / (u * u);
            let sign = if value > band {
                1
            } else if value < -band {
                -1
            } else {
                0
            };
            Ok(SignSample { u, value, sign })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal_metric::schwarzschild_profile;
    use crate::perturbation::build::build_metric_from_f;
    use crate::perturbation::smoothed_bump::smoothed_bump_profile;

    fn params(n: usize, m: f64) -> SchwarzschildParams<f64> {
        SchwarzschildParams::schwarzschild(n, m).unwrap()
    }

    #[test]
    fn budget_inequality() {
        let m = 1.0_f64;
        let b = PerturbationBudget::new(m * m / 16.0, m * m / 16.0, 3, m).unwrap();
        assert!((b.lhs() - 0.5).abs() < 1e-15);
        assert_eq!(b.rhs(), 1.0);
        assert!(b.holds());
        let bad = PerturbationBudget::new(1.0, 0.0, 3, 1.0).unwrap();
        assert!(!bad.holds());
        assert!(PerturbationBudget::new(-1.0, 0.0, 3, 1.0).is_err());
    }

    #[test]
    fn schwarzschild_passes_with_zero_budget() {
        for &(n, m) in &[(3usize, 1.0), (5, 2.0)] {
            let p = params(n, m);
            let prof = schwarzschild_profile(p).unwrap();
            let budget = PerturbationBudget::new(0.0, 0.0, n, m).unwrap();
            let c = p.areal_horizon();
            let grid = ConditionGrid::standard().with_r_samples(vec![1.5 * c, 4.0 * c]);
            let report = check_negativity_conditions(&prof, &p, &budget, &grid).unwrap();
            assert!(report.derivative_margin.abs() < 1e-9, "{report:?}");
            assert!(report.b_margin.abs() < 1e-9, "{report:?}");
            assert!(report.all_r_negative());
        }
    }

    #[test]
    fn violated_budget_fails() {
        let p = params(3, 1.0);
        let prof = schwarzschild_profile(p).unwrap();
        let budget = PerturbationBudget::new(1.0, 0.0, 3, 1.0).unwrap();
        let report = check_negativity_conditions(&prof, &p, &budget, &ConditionGrid::standard()).unwrap();
        assert!(!report.passed);
        assert!(report.budget_lhs >= report.budget_rhs);
    }

    #[test]
    fn hypothesis_on_areal_horizon() {
        let p = params(3, 1.0);
        let heavier = params(3, 1.5);
        let prof = schwarzschild_profile(p).unwrap();
        let budget = PerturbationBudget::new(0.0, 0.0, 3, 1.5).unwrap();
        assert!(matches!(
            check_negativity_conditions(&prof, &heavier, &budget, &ConditionGrid::standard()),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn example_profile_passes() {
        let m = 1.0;
        let pf = smoothed_bump_profile(m, m / 100.0).unwrap();
        let built = build_metric_from_f(&pf, m / 2.0).unwrap();
        let budget = PerturbationBudget::new(m * m / 16.0, m * m / 16.0, 3, m).unwrap();
        let grid = ConditionGrid::standard().with_r_samples(vec![2.02 * m, 3.5 * m, 10.0 * m]);
        let report = check_negativity_conditions(&built, &params(3, m), &budget, &grid).unwrap();
        assert!(report.passed, "{report:?}");
        assert!(report.all_r_negative());
    }

    #[test]
    fn schwarzschild_scan_is_flat() {
        let prof = schwarzschild_profile(params(3, 1.0)).unwrap();
        let scan = scalar_sign_scan(&prof, 2.0, 200.0, 500).unwrap();
        assert!(scan.iter().all(|s| s.sign == 0 && s.value.abs() < 1e-9));
    }
}
