//! Globally adaptive Gauss–Kronrod (10, 21) quadrature.

// tabulated nodes and weights keep their published digits
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use crate::scalar::Real;

// Kronrod abscissae; odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_282_977_182_024,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Value and error estimate of a definite integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
}

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_intervals: usize,
}

impl<T: Real> QuadOptions<T> {
    pub fn new(abs_tol: T, rel_tol: T) -> Self {
        Self {
            abs_tol,
            rel_tol,
            max_intervals: 2_000,
        }
    }

    /// Same absolute and relative tolerance.
    pub fn tol(tol: T) -> Self {
        Self::new(tol, tol)
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

/// One 21-point Kronrod pass with the QUADPACK error rescaling.
pub fn gauss_kronrod_21<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let f_center = f(center);

    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    let mut res_gauss = T::zero();
    let mut res_kronrod = f_center * T::lit(WGK[10]);
    let mut res_abs = res_kronrod.abs();

    for (j, &wg) in WG.iter().enumerate() {
        let jtw = 2 * j + 1;
        let dx = half_len * T::lit(XGK[jtw]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_gauss = res_gauss + T::lit(wg) * (f1 + f2);
        res_kronrod = res_kronrod + T::lit(WGK[jtw]) * (f1 + f2);
        res_abs = res_abs + T::lit(WGK[jtw]) * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = half_len * T::lit(XGK[jtwm1]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_kronrod = res_kronrod + T::lit(WGK[jtwm1]) * (f1 + f2);
        res_abs = res_abs + T::lit(WGK[jtwm1]) * (f1.abs() + f2.abs());
    }

    let mean = res_kronrod * half;
    let mut res_asc = T::lit(WGK[10]) * (f_center - mean).abs();
    for j in 0..10 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let abs_half = half_len.abs();
    let value = res_kronrod * half_len;
    let res_abs = res_abs * abs_half;
    let res_asc = res_asc * abs_half;
    let mut err = ((res_kronrod - res_gauss) * half_len).abs();

    if res_asc != T::zero() && err != T::zero() {
        let scale = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
        err = if scale < T::one() { res_asc * scale } else { res_asc };
    }
    let fifty_eps = T::lit(50.0) * T::epsilon();
    if res_abs > T::min_positive_value() / fifty_eps {
        err = err.max(fifty_eps * res_abs);
    }
    (value, err)
}

/// Adaptive integration of `f` over `[a, b]`, bisecting the interval with
/// the largest error estimate until `error ≤ max(abs_tol, rel_tol·|value|)`.
pub fn integrate<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, opts: QuadOptions<T>) -> Result<Integral<T>> {
    if a == b {
        return Ok(Integral {
            value: T::zero(),
            error: T::zero(),
            evaluations: 0,
        });
    }
    let mut evaluations = 21;
    let (v0, e0) = gauss_kronrod_21(&mut f, a, b);
    let mut segments = vec![Segment {
        a,
        b,
        value: v0,
        error: e0,
    }];
    let mut total = v0;
    let mut total_err = e0;
    let half = T::lit(0.5);

    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::Quadrature {
                a: a.as_f64(),
                b: b.as_f64(),
                value: total.as_f64(),
                error: total_err.as_f64(),
            });
        }
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= target {
            break;
        }
        if segments.len() >= opts.max_intervals {
            return Err(Error::Quadrature {
                a: a.as_f64(),
                b: b.as_f64(),
                value: total.as_f64(),
                error: total_err.as_f64(),
            });
        }
        let (idx, _) = segments
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |best, (i, s)| {
                if s.error > best.1 {
                    (i, s.error)
                } else {
                    best
                }
            });
        let seg = segments.swap_remove(idx);
        let mid = half * (seg.a + seg.b);
        if mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b) {
            // interval can no longer be split in this precision
            return Err(Error::Quadrature {
                a: a.as_f64(),
                b: b.as_f64(),
                value: total.as_f64(),
                error: total_err.as_f64(),
            });
        }
        let (vl, el) = gauss_kronrod_21(&mut f, seg.a, mid);
        let (vr, er) = gauss_kronrod_21(&mut f, mid, seg.b);
        evaluations += 42;
        segments.push(Segment {
            a: seg.a,
            b: mid,
            value: vl,
            error: el,
        });
        segments.push(Segment {
            a: mid,
            b: seg.b,
            value: vr,
            error: er,
        });
        // resum rather than update incrementally to avoid drift
        total = segments.iter().fold(T::zero(), |acc, s| acc + s.value);
        total_err = segments.iter().fold(T::zero(), |acc, s| acc + s.error);
    }

    Ok(Integral {
        value: total,
        error: total_err,
        evaluations,
    })
}

/// [`integrate`] with a relative tolerance and an absolute floor taken from
/// a coarse estimate of `∫|f|`, for integrands whose size is unknown and
/// whose value may cancel to zero.
pub fn integrate_relative<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, rel_tol: T) -> Result<Integral<T>> {
    let (magnitude, _) = gauss_kronrod_21(&mut |x| f(x).abs(), a, b);
    let floor = (rel_tol / T::lit(100.0)).max(T::lit(256.0) * T::epsilon());
    let mut result = integrate(f, a, b, QuadOptions::new(floor * magnitude.abs(), rel_tol))?;
    result.evaluations += 21;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weights_sum_to_interval_length() {
        let gk: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert_relative_eq!(gk, 2.0, max_relative = 1e-14);
        assert_relative_eq!(g, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn kronrod_rule_is_exact_through_degree_31() {
        for k in 0..=31u32 {
            let (v, _) = gauss_kronrod_21(&mut |x: f64| x.powi(k as i32), 0.0, 1.0);
            assert_relative_eq!(v, 1.0 / (k as f64 + 1.0), max_relative = 1e-13);
        }
    }

    #[test]
    fn adaptive_handles_inverse_sqrt_endpoint() {
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, QuadOptions::tol(1e-10)).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-9);
        assert!(r.error <= 1e-9);
    }

    #[test]
    fn adaptive_smooth_and_reversed_limits() {
        let r = integrate(|x: f64| x.sin(), 0.0, std::f64::consts::PI, QuadOptions::tol(1e-13)).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-13);
        let rev = integrate(|x: f64| x.sin(), std::f64::consts::PI, 0.0, QuadOptions::tol(1e-13)).unwrap();
        assert_relative_eq!(rev.value, -2.0, max_relative = 1e-13);
    }

    #[test]
    fn non_integrable_singularity_is_reported() {
        let r = integrate(|x: f64| 1.0 / x, 0.0, 1.0, QuadOptions::tol(1e-10));
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }
}
