//! Monotone piecewise-cubic Hermite interpolation (Fritsch–Carlson slopes).

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct MonotoneCubic<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    slopes: Vec<T>,
}

fn edge_slope<T: Real>(h0: T, h1: T, d0: T, d1: T) -> T {
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let d = ((two * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() {
        T::zero()
    } else if d0.signum() != d1.signum() && d.abs() > three * d0.abs() {
        three * d0
    } else {
        d
    }
}

impl<T: Real> MonotoneCubic<T> {
    pub fn new(xs: Vec<T>, ys: Vec<T>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::Construction(
                "monotone cubic needs at least two (x, y) pairs of equal length".into(),
            ));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Construction("abscissae must be strictly increasing".into()));
        }
        let n = xs.len();
        let h: Vec<T> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<T> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
        let mut slopes = vec![T::zero(); n];
        if n == 2 {
            slopes[0] = delta[0];
            slopes[1] = delta[0];
        } else {
            for i in 1..n - 1 {
                if delta[i - 1] * delta[i] <= T::zero() {
                    slopes[i] = T::zero();
                } else {
                    let w1 = T::lit(2.0) * h[i] + h[i - 1];
                    let w2 = h[i] + T::lit(2.0) * h[i - 1];
                    slopes[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
                }
            }
            slopes[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
            slopes[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(Self { xs, ys, slopes })
    }

    pub fn x_min(&self) -> T {
        self.xs[0]
    }

    pub fn x_max(&self) -> T {
        *self.xs.last().expect("non-empty")
    }

    pub fn last(&self) -> (T, T, T) {
        let n = self.xs.len() - 1;
        (self.xs[n], self.ys[n], self.slopes[n])
    }

    /// Value and first derivative at `x`, which must lie within the knots.
    pub fn eval(&self, x: T) -> (T, T) {
        let n = self.xs.len();
        let i = self.xs.partition_point(|&k| k <= x).saturating_sub(1).min(n - 2);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let one = T::one();
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = two * t3 - three * t2 + one;
        let h10 = t3 - two * t2 + t;
        let h01 = -two * t3 + three * t2;
        let h11 = t3 - t2;
        let value = h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;
        let six = T::lit(6.0);
        let d00 = six * t2 - six * t;
        let d10 = three * t2 - T::lit(4.0) * t + one;
        let d01 = -six * t2 + six * t;
        let d11 = three * t2 - two * t;
        let deriv = (d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1) / h;
        (value, deriv)
    }
}
