//! Profile functions `f(u) = 1 + r φ'(r)` given directly in the areal
//! coordinate.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::grid::log_space;
use crate::numerics::interp::MonotoneCubic;
use crate::numerics::quadrature::integrate_relative;
use crate::scalar::Real;

/// `f` and the quantities derived from it at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint<T> {
    pub value: T,
    /// `1 − f`, computed without cancellation where the construction allows.
    pub deficit: T,
    pub derivative: T,
    /// `f·f'`, finite where `f` vanishes like a square root.
    pub value_times_derivative: T,
}

/// Called with `u` and `u − C_f`; the offset is exact where `u` was built
/// from it, which matters within rounding distance of `C_f`.
type Evaluator<T> = dyn Fn(T, T) -> ProfilePoint<T> + Send + Sync;

/// A profile on `[C_f, ∞)` with `f(C_f) = 0`.
#[derive(Clone)]
pub struct ProfileFunction<T> {
    n: usize,
    c_f: T,
    eval: Arc<Evaluator<T>>,
}

impl<T: Real> fmt::Debug for ProfileFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProfileFunction")
            .field("n", &self.n)
            .field("c_f", &self.c_f)
            .finish_non_exhaustive()
    }
}

impl<T: Real> ProfileFunction<T> {
    pub fn new<F>(n: usize, c_f: T, eval: F) -> Result<Self>
    where
        F: Fn(T) -> ProfilePoint<T> + Send + Sync + 'static,
    {
        Self::with_offset(n, c_f, move |u, _| eval(u))
    }

    /// Like [`ProfileFunction::new`] but `eval` also receives `u − C_f`.
    pub fn with_offset<F>(n: usize, c_f: T, eval: F) -> Result<Self>
    where
        F: Fn(T, T) -> ProfilePoint<T> + Send + Sync + 'static,
    {
        if n < 3 {
            return Err(Error::Parameter(format!("dimension n = {n} must be at least 3")));
        }
        if !(c_f > T::zero()) || !c_f.is_finite() {
            return Err(Error::Profile("C_f must be positive and finite".into()));
        }
        Ok(Self {
            n,
            c_f,
            eval: Arc::new(eval),
        })
    }

    /// `f_{n,m}(u) = sqrt(1 − 2m / u^{n−2})`.
    pub fn schwarzschild(n: usize, m: T) -> Result<Self> {
        if n < 3 {
            return Err(Error::Parameter(format!("dimension n = {n} must be at least 3")));
        }
        if !(m > T::zero()) {
            return Err(Error::Parameter("mass m must be positive".into()));
        }
        let d = T::of(n - 2);
        let two_m = T::lit(2.0) * m;
        let c_f = two_m.powf(T::one() / d);
        Self::with_offset(n, c_f, move |u, offset| schwarzschild_point(d, m, c_f, u, offset))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c_f(&self) -> T {
        self.c_f
    }

    pub fn point(&self, u: T) -> ProfilePoint<T> {
        (self.eval)(u, u - self.c_f)
    }

    pub fn f(&self, u: T) -> T {
        self.point(u).value
    }

    pub fn df(&self, u: T) -> T {
        self.point(u).derivative
    }

    /// `∫_{C_f}^{u} dx / (x f(x))` with `x = C_f + w²`, which removes the
    /// square-root endpoint singularity.
    pub fn log_integral(&self, u: T, tol: T) -> Result<T> {
        if u < self.c_f {
            return Err(Error::Domain(format!(
                "u = {:e} lies below C_f = {:e}",
                u.as_f64(),
                self.c_f.as_f64()
            )));
        }
        let w_end = (u - self.c_f).sqrt();
        integrate_relative(|w| self.w_integrand(w), T::zero(), w_end, tol).map(|i| i.value)
    }

    /// `2w / (x f(x))` at `x = C_f + w²`.
    pub(crate) fn w_integrand(&self, w: T) -> T {
        let offset = w * w;
        let x = self.c_f + offset;
        T::lit(2.0) * w / (x * (self.eval)(x, offset).value)
    }

    /// Checks `f(C_f) = 0`, positivity on a log grid over `(C_f, 10⁴ C_f]`,
    /// and convergence of `∫ du / (u f)` near `C_f` under refinement.
    pub fn validate(&self) -> Result<()> {
        let f0 = self.f(self.c_f);
        if !(f0.abs() <= T::lit(1e-12)) {
            return Err(Error::Profile(format!("f(C_f) = {:e} must vanish", f0.as_f64())));
        }
        let span = T::lit(1e4);
        for u in log_space(self.c_f, self.c_f * span, 2048).into_iter().skip(1) {
            let fu = self.f(u);
            if !(fu > T::zero()) {
                return Err(Error::Profile(format!(
                    "f({:e}) = {:e} must be positive",
                    u.as_f64(),
                    fu.as_f64()
                )));
            }
        }
        let upper = self.c_f * T::lit(10.0);
        let coarse = self.log_integral(upper, T::lit(1e-6));
        let fine = self.log_integral(upper, T::lit(1e-10));
        match (coarse, fine) {
            (Ok(a), Ok(b)) if (a - b).abs() <= T::lit(1e-5) * b.abs().max(T::one()) => Ok(()),
            _ => Err(Error::Profile("1/(u f(u)) does not appear integrable at C_f".into())),
        }
    }

    /// Reads a two-column text table `u f(u)`. Blank lines and lines
    /// starting with `#` are ignored. The first row fixes `C_f` and must
    /// have `f = 0`; rows must increase strictly in `u` with `f > 0` after
    /// the first.
    ///
    /// The profile is interpolated by a monotone cubic in `w = sqrt(u − C_f)`
    /// and continued past the last row by `sqrt(1 − c u^{−q})`, matching
    /// value and slope there.
    pub fn from_table(n: usize, text: &str) -> Result<Self> {
        let mut us = Vec::new();
        let mut fs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if fields.len() != 2 {
                return Err(Error::Table {
                    line,
                    message: format!("expected two columns, found {}", fields.len()),
                });
            }
            let parse = |s: &str| -> Result<T> {
                let v: f64 = s.parse().map_err(|_| Error::Table {
                    line,
                    message: format!("'{s}' is not a number"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Table {
                        line,
                        message: format!("'{s}' is not finite"),
                    });
                }
                Ok(T::lit(v))
            };
            let u = parse(fields[0])?;
            let f = parse(fields[1])?;
            if let Some(&prev) = us.last() {
                if !(u > prev) {
                    return Err(Error::Table {
                        line,
                        message: "u must increase strictly".into(),
                    });
                }
                if !(f > T::zero()) {
                    return Err(Error::Table {
                        line,
                        message: "f must be positive after the first row".into(),
                    });
                }
            } else if f.abs() > T::lit(1e-12) || !(u > T::zero()) {
                return Err(Error::Table {
                    line,
                    message: "the first row must be (C_f, 0) with C_f > 0".into(),
                });
            }
            us.push(u);
            fs.push(f);
        }
        if us.len() < 3 {
            return Err(Error::Table {
                line: text.lines().count(),
                message: "at least three rows are required".into(),
            });
        }
        Self::from_samples(n, us, fs)
    }

    fn from_samples(n: usize, us: Vec<T>, mut fs: Vec<T>) -> Result<Self> {
        let c_f = us[0];
        fs[0] = T::zero();
        let ws: Vec<T> = us.iter().map(|&u| (u - c_f).sqrt()).collect();
        let spline = MonotoneCubic::new(ws, fs)?;
        let (w_last, f_last, slope_w) = spline.last();
        let u_last = c_f + w_last * w_last;
        let df_last = slope_w / (T::lit(2.0) * w_last);
        let gap = T::one() - f_last * f_last;
        if !(gap > T::zero()) || !(df_last > T::zero()) {
            return Err(Error::Profile(
                "the last table row needs 0 < f < 1 and a positive slope to continue the profile".into(),
            ));
        }
        let q = T::lit(2.0) * f_last * df_last * u_last / gap;
        let c = gap * u_last.powf(q);

        Self::with_offset(n, c_f, move |u, offset| {
            if u > u_last {
                let deficit_sq = c * u.powf(-q);
                let value = (T::one() - deficit_sq).sqrt();
                let ff = q * deficit_sq / (T::lit(2.0) * u);
                ProfilePoint {
                    value,
                    deficit: deficit_sq / (T::one() + value),
                    derivative: ff / value,
                    value_times_derivative: ff,
                }
            } else {
                let w = offset.max(T::zero()).sqrt();
                let (value, dw) = spline.eval(w);
                // df/du = (df/dw) / (2w); at w = 0 use f ≈ w·df/dw
                let ff = if w > T::zero() {
                    value * dw / (T::lit(2.0) * w)
                } else {
                    dw * dw / T::lit(2.0)
                };
                ProfilePoint {
                    value,
                    deficit: T::one() - value,
                    derivative: dw / (T::lit(2.0) * w),
                    value_times_derivative: ff,
                }
            }
        })
    }
}

/// `f_{n,m}` at `u = C + offset` with `C^{n−2} = 2m`; `1 − 2m/u^{n−2}` is
/// formed as `1 − (1 + offset/C)^{−(n−2)}` to keep precision near `C`.
pub(crate) fn schwarzschild_point<T: Real>(d: T, m: T, c: T, u: T, offset: T) -> ProfilePoint<T> {
    let ratio = T::lit(2.0) * m * u.powf(-d);
    let gap = -(-d * (offset / c).ln_1p()).exp_m1();
    let value = gap.max(T::zero()).sqrt();
    let ff = d * m * u.powf(-d - T::one());
    ProfilePoint {
        value,
        deficit: ratio / (T::one() + value),
        derivative: ff / value,
        value_times_derivative: ff,
    }
}
