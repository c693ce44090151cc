//! Inversion of monotone functions on a bracket.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Solves `value(x) = target` for increasing `value` on `[lo, hi]`.
///
/// `eval` returns `(value(x), value'(x))`. Newton steps are taken whenever
/// they stay strictly inside the current bracket, otherwise the bracket is
/// bisected, so convergence never depends on the derivative being accurate.
pub fn invert_increasing<T, F>(mut eval: F, target: T, mut lo: T, mut hi: T, rel_tol: T) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> (T, T),
{
    let (f_lo, _) = eval(lo);
    let (f_hi, _) = eval(hi);
    if f_lo > target || f_hi < target {
        return Err(Error::Root(format!(
            "target {:e} not bracketed by [{:e}, {:e}] with values [{:e}, {:e}]",
            target.as_f64(),
            lo.as_f64(),
            hi.as_f64(),
            f_lo.as_f64(),
            f_hi.as_f64()
        )));
    }
    if f_lo == target {
        return Ok(lo);
    }
    if f_hi == target {
        return Ok(hi);
    }

    let half = T::lit(0.5);
    let mut x = half * (lo + hi);
    for _ in 0..200 {
        let (fx, dfx) = eval(x);
        let resid = fx - target;
        if resid == T::zero() {
            return Ok(x);
        }
        if resid < T::zero() {
            lo = x;
        } else {
            hi = x;
        }
        let width_tol = rel_tol * x.abs().max(T::min_positive_value());
        if hi - lo <= width_tol {
            return Ok(half * (lo + hi));
        }
        let newton = if dfx > T::zero() && dfx.is_finite() {
            x - resid / dfx
        } else {
            T::nan()
        };
        if newton > lo && newton < hi {
            let step = (newton - x).abs();
            x = newton;
            if step <= width_tol {
                return Ok(x);
            }
        } else {
            x = half * (lo + hi);
        }
    }
    Err(Error::Root(format!(
        "no convergence after 200 iterations in [{:e}, {:e}]",
        lo.as_f64(),
        hi.as_f64()
    )))
}

/// Grows `hi` geometrically from `start` until `value(hi) ≥ target`.
pub fn grow_upper_bracket<T, F>(mut value: F, target: T, start: T, factor: T) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let mut hi = start;
    for _ in 0..2_000 {
        if value(hi) >= target {
            return Ok(hi);
        }
        hi = hi * factor;
        if !hi.is_finite() {
            break;
        }
    }
    Err(Error::Root(format!(
        "could not bracket target {:e} above {:e}",
        target.as_f64(),
        start.as_f64()
    )))
}
