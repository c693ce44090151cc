//! A three-dimensional perturbation of Schwarzschild whose scalar
//! curvature changes sign: `f = f_{3,m} + ℰ(u)/u²` with `ℰ` a smoothed
//! piecewise-linear bump.

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::profile_fn::{schwarzschild_point, ProfileFunction, ProfilePoint};

/// Default smoothing width as a fraction of `m`.
pub const DEFAULT_SMOOTHING_FRACTION: f64 = 0.01;

/// Piecewise-linear `E` and its smoothing `ℰ`.
///
/// `E` is a sum of ramps `Δs_k (u − c_k)_+` with kinks at `3m`, `4m`, `6m`.
/// Each ramp is convolved with the triweight kernel
/// `K(t) = (35/32)(1 − t²)³` of half-width `w`, so `ℰ` is C² and equals `E`
/// outside `w`-neighbourhoods of the kinks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothedBump<T> {
    m: T,
    width: T,
}

fn kernel_cdf<T: Real>(t: T) -> T {
    if t <= -T::one() {
        return T::zero();
    }
    if t >= T::one() {
        return T::one();
    }
    let t2 = t * t;
    let poly = t * (T::one() - t2 + T::lit(0.6) * t2 * t2 - t2 * t2 * t2 / T::lit(7.0));
    T::lit(35.0 / 32.0) * poly + T::lit(0.5)
}

/// `∫_{−∞}^{t} CDF`, the smoothed unit ramp.
fn smoothed_ramp<T: Real>(t: T) -> T {
    if t <= -T::one() {
        return T::zero();
    }
    if t >= T::one() {
        return t;
    }
    let t2 = t * t;
    let t4 = t2 * t2;
    let poly = t2 / T::lit(2.0) - t4 / T::lit(4.0) + t4 * t2 / T::lit(10.0) - t4 * t4 / T::lit(56.0);
    T::lit(35.0 / 32.0) * poly + t / T::lit(2.0) + T::lit(35.0 / 256.0)
}

impl<T: Real> SmoothedBump<T> {
    pub fn new(m: T, width: T) -> Result<Self> {
        if !(m > T::zero()) {
            return Err(Error::Parameter("mass m must be positive".into()));
        }
        if !(width > T::zero()) || !(width < m / T::lit(4.0)) {
            return Err(Error::Construction(format!(
                "smoothing width {:e} must lie in (0, m/4)",
                width.as_f64()
            )));
        }
        Ok(Self { m, width })
    }

    fn kinks(&self) -> [(T, T); 3] {
        let m = self.m;
        let s = m / T::lit(256.0);
        [
            (T::lit(3.0) * m, -s),
            (T::lit(4.0) * m, T::lit(2.0) * s),
            (T::lit(6.0) * m, -s),
        ]
    }

    /// The unsmoothed `E(u)`.
    pub fn raw(&self, u: T) -> T {
        self.kinks()
            .iter()
            .fold(T::zero(), |acc, &(c, ds)| acc + ds * (u - c).max(T::zero()))
    }

    /// `(ℰ, ℰ')` at `u`.
    pub fn smoothed(&self, u: T) -> (T, T) {
        let w = self.width;
        self.kinks().iter().fold((T::zero(), T::zero()), |(v, d), &(c, ds)| {
            let t = (u - c) / w;
            (v + ds * w * smoothed_ramp(t), d + ds * kernel_cdf(t))
        })
    }

    /// `ℰ''`, the kernel itself at each kink.
    pub fn smoothed_second_derivative(&self, u: T) -> T {
        let w = self.width;
        self.kinks().iter().fold(T::zero(), |acc, &(c, ds)| {
            let t = (u - c) / w;
            if t.abs() >= T::one() {
                acc
            } else {
                let q = T::one() - t * t;
                acc + ds / w * T::lit(35.0 / 32.0) * q * q * q
            }
        })
    }
}

/// `f(u) = sqrt(1 − 2m/u) + ℰ(u)/u²` on `[2m, ∞)`.
pub fn smoothed_bump_profile<T: Real>(m: T, smoothing_width: T) -> Result<ProfileFunction<T>> {
    let bump = SmoothedBump::new(m, smoothing_width)?;
    let c = T::lit(2.0) * m;
    let pf = ProfileFunction::with_offset(3, c, move |u, offset| {
        let base = schwarzschild_point(T::one(), m, c, u, offset);
        let (e, de) = bump.smoothed(u);
        if e == T::zero() && de == T::zero() {
            return base;
        }
        let u2 = u * u;
        let extra = e / u2;
        let extra_d = de / u2 - T::lit(2.0) * e / (u2 * u);
        let value = base.value + extra;
        ProfilePoint {
            value,
            deficit: base.deficit - extra,
            derivative: base.derivative + extra_d,
            value_times_derivative: value * (base.derivative + extra_d),
        }
    })?;
    // f > 0 is re-checked rather than assumed
    pf.validate()
        .map_err(|e| Error::Construction(format!("smoothed profile is invalid: {e}")))?;
    Ok(pf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn piecewise_values() {
        let m = 1.3_f64;
        let b = SmoothedBump::new(m, m / 100.0).unwrap();
        assert_relative_eq!(b.raw(6.0 * m), m * m / 256.0, max_relative = 1e-14);
        assert_eq!(b.raw(3.0 * m), 0.0);
        assert_relative_eq!(b.raw(4.0 * m), -m * m / 256.0, max_relative = 1e-14);
        assert_relative_eq!(b.raw(50.0 * m), m * m / 256.0, max_relative = 1e-14);
    }

    #[test]
    fn smoothing_is_local() {
        let m = 1.0_f64;
        let w = m / 100.0;
        let b = SmoothedBump::new(m, w).unwrap();
        for i in 0..=4000 {
            let u = 2.0 * m + 6.0 * m * i as f64 / 4000.0;
            let near = [3.0, 4.0, 6.0].iter().any(|c| (u - c * m).abs() < w);
            if !near {
                assert!((b.smoothed(u).0 - b.raw(u)).abs() < 1e-15, "u={u}");
            }
        }
    }

    #[test]
    fn smoothing_is_continuously_differentiable() {
        let m = 1.0_f64;
        let w = m / 100.0;
        let b = SmoothedBump::new(m, w).unwrap();
        let h = 1e-6;
        let mut max_jump: f64 = 0.0;
        for i in 0..=20000 {
            let u = 2.5 + 4.0 * i as f64 / 20000.0;
            let (_, d) = b.smoothed(u);
            let fd = (b.smoothed(u + h).0 - b.smoothed(u - h).0) / (2.0 * h);
            assert!((fd - d).abs() < 1e-8, "u={u}");
            let (_, d_next) = b.smoothed(u + h);
            max_jump = max_jump.max((d_next - d).abs());
            let fd2 = (b.smoothed(u + h).1 - b.smoothed(u - h).1) / (2.0 * h);
            assert!((fd2 - b.smoothed_second_derivative(u)).abs() < 1e-5, "u={u}");
        }
        // ℰ' moves at most |ℰ''|·h between neighbouring samples
        assert!(max_jump < 2.0 / 256.0 / w * 35.0 / 32.0 * h * 1.01);
    }

    #[test]
    fn profile_vanishes_at_left_end() {
        let pf = smoothed_bump_profile(1.0_f64, 0.01).unwrap();
        assert_eq!(pf.c_f(), 2.0);
        assert_eq!(pf.f(2.0), 0.0);
        let p = pf.point(5.0);
        assert_relative_eq!(p.value, (1.0 - 2.0 / 5.0f64).sqrt(), max_relative = 1e-15);
        let p = pf.point(10.0);
        assert_relative_eq!(p.value, (0.8f64).sqrt() + 1.0 / 25600.0, max_relative = 1e-15);
        assert_relative_eq!(p.deficit, 1.0 - p.value, max_relative = 1e-12);
    }

    #[test]
    fn rejects_wide_smoothing() {
        assert!(matches!(
            smoothed_bump_profile(1.0_f64, 0.25),
            Err(Error::Construction(_))
        ));
        assert!(matches!(
            smoothed_bump_profile(1.0_f64, 0.0),
            Err(Error::Construction(_))
        ));
        assert!(smoothed_bump_profile(1.0_f64, 0.2).is_ok());
    }
}
