use crate::scalar::Real;

/// `count` points spaced evenly in `log` between `lo` and `hi` inclusive.
pub fn log_space<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let last = T::of(count - 1);
            (0..count)
                .map(|i| match i {
                    0 => lo,
                    i if i == count - 1 => hi,
                    i => (a + (b - a) * T::of(i) / last).exp(),
                })
                .collect()
        }
    }
}

/// `count` points evenly spaced strictly inside `(lo, hi)`.
pub fn interior_space<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    let denom = T::of(count + 1);
    (1..=count).map(|i| lo + (hi - lo) * T::of(i) / denom).collect()
}

/// Default size of invariant-checking grids.
pub const CHECK_GRID_POINTS: usize = 512;
