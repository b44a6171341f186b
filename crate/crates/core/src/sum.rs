//! Summation helpers: compensated (Kahan) accumulation and a deterministic
//! pairwise tree reduction used by the parallel quadrature paths.

use crate::real::Real;

/// Kahan–Babuska compensated accumulator.
#[derive(Clone, Copy, Debug)]
pub struct Kahan<R: Real> {
    sum: R,
    carry: R,
}

impl<R: Real> Default for Kahan<R> {
    fn default() -> Self {
        Kahan {
            sum: R::zero(),
            carry: R::zero(),
        }
    }
}

impl<R: Real> Kahan<R> {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: R) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> R {
        self.sum + self.carry
    }
}

/// Compensated sum of a slice.
pub fn kahan_sum<R: Real>(xs: &[R]) -> R {
    let mut acc = Kahan::new();
    for &x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Pairwise tree sum. The reduction order depends only on the slice layout,
/// never on thread scheduling, so parallel callers that collect per-chunk
/// partials in index order get bit-identical totals.
pub fn pairwise_sum<R: Real>(xs: &[R]) -> R {
    match xs.len() {
        0 => R::zero(),
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_cancellation() {
        let mut acc = Kahan::<f64>::new();
        acc.add(1.0);
        acc.add(1e-16);
        acc.add(1e-16);
        acc.add(-1.0);
        assert_eq!(acc.value(), 2e-16);
    }

    #[test]
    fn pairwise_matches_exact_on_integers() {
        let xs: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 500500.0);
    }

    #[test]
    fn pairwise_is_deterministic_under_chunking() {
        let xs: Vec<f64> = (0..4097).map(|i| ((i * 2654435761u64 as usize) as f64).sin()).collect();
        let a = pairwise_sum(&xs);
        let b = pairwise_sum(&xs);
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
