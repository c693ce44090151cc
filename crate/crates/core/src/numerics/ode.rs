//! Dormand–Prince 5(4) integrator with PI step-size control.

use crate::error::{Error, Result};
use crate::scalar::Real;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;

/// Whether integration should continue after an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_steps: usize,
}

impl<T: Real> OdeOptions<T> {
    pub fn new(rel_tol: T, abs_tol: T) -> Self {
        Self {
            rel_tol,
            abs_tol,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

fn axpy<T: Real, const N: usize>(y: &[T; N], h: T, terms: &[(f64, &[T; N])]) -> [T; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = T::zero();
        for (c, k) in terms {
            acc = acc + T::lit(*c) * k[i];
        }
        out[i] = y[i] + h * acc;
    }
    out
}

fn error_norm<T: Real, const N: usize>(err: &[T; N], y: &[T; N], y_new: &[T; N], opts: &OdeOptions<T>) -> T {
    let mut norm = T::zero();
    for i in 0..N {
        let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
        norm = norm.max((err[i] / scale).abs());
    }
    norm
}

fn initial_step<T: Real, const N: usize, F>(rhs: &mut F, s0: T, y0: &[T; N], f0: &[T; N], opts: &OdeOptions<T>) -> T
where
    F: FnMut(T, &[T; N]) -> [T; N],
{
    // components that start at zero carry no length scale
    let mut d0 = T::zero();
    let mut d1 = T::zero();
    for i in 0..N {
        if y0[i] == T::zero() {
            continue;
        }
        let sc = opts.abs_tol + opts.rel_tol * y0[i].abs();
        d0 = d0.max((y0[i] / sc).abs());
        d1 = d1.max((f0[i] / sc).abs());
    }
    let small = T::lit(1e-5);
    let mut h0 = if d0 < small || d1 < small {
        T::lit(1e-6)
    } else {
        T::lit(0.01) * d0 / d1
    };
    h0 = h0.max(T::lit(1e-12));
    let y1 = axpy(y0, h0, &[(1.0, f0)]);
    let f1 = rhs(s0 + h0, &y1);
    let mut d2 = T::zero();
    for i in 0..N {
        let sc = opts.abs_tol + opts.rel_tol * y0[i].abs().max(y1[i].abs());
        d2 = d2.max(((f1[i] - f0[i]) / sc).abs());
    }
    d2 = d2 / h0;
    let dmax = d1.max(d2);
    let h1 = if dmax <= T::lit(1e-15) {
        (h0 * T::lit(1e-3)).max(T::lit(1e-6))
    } else {
        (T::lit(0.01) / dmax).powf(T::lit(0.2))
    };
    (T::lit(100.0) * h0).min(h1)
}

/// Integrates `y' = rhs(s, y)` from `s0` towards `s_end` (which may be
/// infinite), calling `on_step` after every accepted step.
///
/// Returns the final `(s, y)` and step statistics. Failure diagnostics report
/// the first state component in the `r` slot of [`Error::Integration`].
pub fn dormand_prince<T, const N: usize, F, S>(
    mut rhs: F,
    s0: T,
    y0: [T; N],
    s_end: T,
    opts: OdeOptions<T>,
    mut on_step: S,
) -> Result<(T, [T; N], OdeStats)>
where
    T: Real,
    F: FnMut(T, &[T; N]) -> [T; N],
    S: FnMut(T, &[T; N]) -> Flow,
{
    let mut s = s0;
    let mut y = y0;
    let mut k1 = rhs(s, &y);
    let mut h = initial_step(&mut rhs, s, &y, &k1, &opts);
    let mut err_old = T::lit(1e-4);
    let mut last_rejected = false;
    let mut stats = OdeStats {
        accepted: 0,
        rejected: 0,
    };

    let fail = |s: T, y: &[T; N], h: T, reason: &str| Error::Integration {
        s: s.as_f64(),
        r: y[0].as_f64(),
        step: h.as_f64(),
        reason: reason.to_string(),
    };

    while s < s_end {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(fail(s, &y, h, "step budget exhausted"));
        }
        let mut last = false;
        if s + h >= s_end {
            h = s_end - s;
            last = true;
        }
        if h <= T::epsilon() * T::lit(16.0) * s.abs().max(T::one()) {
            return Err(fail(s, &y, h, "step size underflow"));
        }

        let y2 = axpy(&y, h, &[(A21, &k1)]);
        let k2 = rhs(s + T::lit(C2) * h, &y2);
        let y3 = axpy(&y, h, &[(A31, &k1), (A32, &k2)]);
        let k3 = rhs(s + T::lit(C3) * h, &y3);
        let y4 = axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        let k4 = rhs(s + T::lit(C4) * h, &y4);
        let y5 = axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        let k5 = rhs(s + T::lit(C5) * h, &y5);
        let y6 = axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
        let k6 = rhs(s + h, &y6);
        let y_new = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = rhs(s + h, &y_new);

        let mut err = [T::zero(); N];
        for i in 0..N {
            err[i] = h
                * (T::lit(E1) * k1[i]
                    + T::lit(E3) * k3[i]
                    + T::lit(E4) * k4[i]
                    + T::lit(E5) * k5[i]
                    + T::lit(E6) * k6[i]
                    + T::lit(E7) * k7[i]);
        }
        let en = error_norm(&err, &y, &y_new, &opts);
        if !en.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            h = h * T::lit(FAC_MIN);
            stats.rejected += 1;
            last_rejected = true;
            continue;
        }

        if en <= T::one() {
            let en_c = en.max(T::lit(1e-10));
            let mut fac = en_c.powf(T::lit(ALPHA)) / err_old.powf(T::lit(BETA)) / T::lit(SAFETY);
            fac = fac.max(T::one() / T::lit(FAC_MAX)).min(T::one() / T::lit(FAC_MIN));
            let mut h_next = h / fac;
            if last_rejected {
                h_next = h_next.min(h);
            }
            err_old = en_c;
            s = if last { s_end } else { s + h };
            y = y_new;
            k1 = k7;
            stats.accepted += 1;
            last_rejected = false;
            if on_step(s, &y) == Flow::Stop {
                break;
            }
            h = h_next;
        } else {
            let fac = (en.powf(T::lit(ALPHA)) / T::lit(SAFETY)).min(T::one() / T::lit(FAC_MIN));
            h = h / fac;
            stats.rejected += 1;
            last_rejected = true;
        }
    }
    Ok((s, y, stats))
}
