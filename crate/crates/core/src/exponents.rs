//! Closed-form exponent bookkeeping for the moment asymptotics: b_a(k), the
//! mean-power ceiling A0(a), the saving exponent alpha(k, A0), the error
//! power saving delta, and the per-k closed forms with their admissible
//! a-ranges.
//!
//! Two readings of the large-k alpha branch exist: the degenerate one as
//! printed (second term collapses to a) and the corrected one whose delta
//! reproduces every per-k closed-form denominator exactly. The corrected
//! form is used throughout; the raw one stays available for inspection.

use crate::error::{Error, Result};
use crate::real::{r, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    SmallK,
    LargeK,
}

/// All exponent quantities for one (a, k).
#[derive(Clone, Copy, Debug)]
pub struct ExponentBundle<R: Real> {
    pub a: R,
    pub k: usize,
    pub a0: R,
    pub b: R,
    pub alpha: R,
    pub delta: R,
    pub branch: Branch,
}

/// b_a(k) = 2^{k-2} + (k-6)/4 - ka/2, for k >= 3.
pub fn b_a<R: Real>(a: R, k: usize) -> R {
    assert!(k >= 3);
    r::<R>(2f64.powi(k as i32 - 2)) + r::<R>((k as f64 - 6.0) / 4.0) - r::<R>(k as f64) * a / r(2.0)
}

/// A0 = 8(1 - a^2) / (1 - 2a), the mean-power exponent the unconditional
/// upper bound supplies.
pub fn a0<R: Real>(a: R) -> R {
    r::<R>(8.0) * (R::one() - a * a) / (R::one() - r::<R>(2.0) * a)
}

/// Corrected large-k branch: alpha = (A0 - k)(1 + 2a) / (2(A0 - 2)).
pub fn alpha_large_k<R: Real>(a: R, a0: R, k: usize) -> R {
    (a0 - r(k as f64)) * (R::one() + r::<R>(2.0) * a) / (r::<R>(2.0) * (a0 - r(2.0)))
}

/// The branch formula exactly as printed, whose second term degenerates to a.
/// Kept for side-by-side inspection only.
pub fn alpha_large_k_printed<R: Real>(a: R, a0: R, k: usize) -> R {
    (a0 - r(k as f64)) / (r::<R>(2.0) * (a0 - r(2.0))) + a
}

pub fn exponent_bundle<R: Real>(a: R, k: usize) -> Result<ExponentBundle<R>> {
    let af = a.to_f64().unwrap_or(f64::NAN);
    if !(af > -0.5 && af < 0.0) {
        return Err(Error::domain(format!("a must lie in (-1/2, 0), got {af}")));
    }
    if k < 3 {
        return Err(Error::domain(format!("k = {k} below 3")));
    }
    let a0v = a0(a);
    if r::<R>(k as f64) >= a0v {
        return Err(Error::domain(format!(
            "k = {k} not below A0 = {a0v}; the asymptotic is conditional there"
        )));
    }
    // SmallK iff k - 1 < A0/2; the complement is exactly A0/2 + 1 <= k,
    // so the two printed conditions tile the range with no gap.
    let branch = if r::<R>(k as f64 - 1.0) < a0v / r(2.0) {
        Branch::SmallK
    } else {
        Branch::LargeK
    };
    let alpha = match branch {
        Branch::SmallK => r::<R>(0.25) + a / r(2.0),
        Branch::LargeK => alpha_large_k(a, a0v, k),
    };
    let b = b_a(a, k);
    let delta = alpha / (r::<R>(2.0) * b + r::<R>(2.0) * alpha);
    Ok(ExponentBundle {
        a,
        k,
        a0: a0v,
        b,
        alpha,
        delta,
        branch,
    })
}

/// Admissible a-range (open on both ends except the interior branch split)
/// of the per-k closed form.
pub fn corollary_range(k: usize) -> Result<(f64, f64)> {
    Ok(match k {
        3 => (-0.5, 0.0),
        4 => (-(3f64.sqrt() - 1.0) / 2.0, 0.0),
        5 => (-0.25, 0.0),
        6 => (-(13f64.sqrt() - 3.0) / 4.0, 0.0),
        7 => (-(57f64.sqrt() - 7.0) / 8.0, 0.0),
        _ => return Err(Error::domain(format!("no closed form for k = {k}"))),
    })
}

/// The per-k closed-form delta, numerator signs corrected so the value is
/// positive on the stated range.
pub fn corollary_delta<R: Real>(a: R, k: usize) -> Result<R> {
    let af = a.to_f64().ok_or_else(|| Error::domain("a not finite"))?;
    let (lo, hi) = corollary_range(k)?;
    if !(af > lo && af < hi) {
        return Err(Error::domain(format!(
            "a = {af} outside ({lo}, {hi}) for k = {k}"
        )));
    }
    let two = r::<R>(2.0);
    let one = R::one();
    let v = match k {
        3 => {
            if af <= -(3f64.sqrt() - 1.0) / 2.0 {
                (one + two * a) * (one + two * a) * (r::<R>(5.0) - r::<R>(4.0) * a)
                    / (r::<R>(8.0)
                        * (r::<R>(5.0) + two * a - r::<R>(7.0) * a * a
                            + two * a * a * a))
            } else {
                (one + two * a) / (r::<R>(12.0) - r::<R>(8.0) * a)
            }
        }
        4 => {
            if af <= -(13f64.sqrt() - 3.0) / 4.0 {
                (one + r::<R>(4.0) * a + two * a * a - r::<R>(4.0) * a * a * a)
                    / (r::<R>(23.0) + r::<R>(10.0) * a - r::<R>(32.0) * a * a
                        + r::<R>(8.0) * a * a * a)
            } else {
                (one + two * a) / (r::<R>(30.0) - r::<R>(12.0) * a)
            }
        }
        5 => {
            (one + two * a) * (r::<R>(3.0) + r::<R>(10.0) * a - r::<R>(8.0) * a * a)
                / (r::<R>(24.0)
                    * (r::<R>(8.0) + r::<R>(4.0) * a - r::<R>(11.0) * a * a
                        + two * a * a * a))
        }
        6 => {
            (one + r::<R>(8.0) * a + r::<R>(8.0) * a * a - r::<R>(8.0) * a * a * a)
                / (r::<R>(194.0) + r::<R>(108.0) * a - r::<R>(264.0) * a * a
                    + r::<R>(32.0) * a * a * a)
        }
        7 => {
            (one + r::<R>(16.0) * a + r::<R>(20.0) * a * a - r::<R>(16.0) * a * a * a)
                / (r::<R>(776.0) + r::<R>(464.0) * a - r::<R>(1048.0) * a * a
                    + r::<R>(80.0) * a * a * a)
        }
        _ => unreachable!(),
    };
    Ok(v)
}

/// The truncation parameter choice y = T^{1/(2 b_a(k) + 2 alpha(k, A0))}.
pub fn auto_cutoff<R: Real>(a: R, k: usize, t: R) -> Result<u64> {
    let bundle = exponent_bundle(a, k)?;
    let expo = R::one() / (r::<R>(2.0) * bundle.b + r::<R>(2.0) * bundle.alpha);
    let y = t.powf(expo).to_f64().unwrap_or(1.0).round();
    Ok(y.max(1.0) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn b_a_values() {
        assert!((b_a(-0.25f64, 3) - 13.0 / 8.0).abs() < 1e-15);
        assert!((b_a(-0.25f64, 5) - 67.0 / 8.0).abs() < 1e-15);
        assert!((b_a(-1e-12f64, 6) - 16.0).abs() < 1e-10);
    }

    #[test]
    fn bundle_small_k_example() {
        let b = exponent_bundle(-0.25f64, 3).unwrap();
        assert!((b.a0 - 5.0).abs() < 1e-14);
        assert_eq!(b.branch, Branch::SmallK);
        assert!((b.alpha - 0.125).abs() < 1e-15);
        assert!((b.b - 13.0 / 8.0).abs() < 1e-15);
        assert!((b.delta - 1.0 / 28.0).abs() < 1e-15);
    }

    #[test]
    fn bundle_large_k_examples() {
        let b = exponent_bundle(-0.1f64, 5).unwrap();
        assert_eq!(b.branch, Branch::LargeK);
        assert!((b.delta - 0.008547008547008548).abs() < 1e-12);
        let b = exponent_bundle(-0.4f64, 3).unwrap();
        assert_eq!(b.branch, Branch::LargeK);
        assert!((b.delta - 0.011178861788617897).abs() < 1e-12);
    }

    #[test]
    fn printed_branch_differs_from_corrected() {
        let a = -0.1f64;
        let a0v = a0(a);
        let corrected = alpha_large_k(a, a0v, 5);
        let printed = alpha_large_k_printed(a, a0v, 5);
        assert!((corrected - printed).abs() > 1e-3);
    }

    #[test]
    fn domain_errors() {
        assert!(exponent_bundle(-0.25f64, 2).is_err());
        // A0(-0.25) = 5, so k = 5 is out of reach there
        assert!(exponent_bundle(-0.25f64, 5).is_err());
        assert!(exponent_bundle(0.1f64, 3).is_err());
        assert!(corollary_delta(-0.3f64, 5).is_err());
        assert!(corollary_delta(-0.1f64, 8).is_err());
    }

    #[test]
    fn corollary_spot_values() {
        assert!((corollary_delta(-0.1f64, 4).unwrap() - 0.8 / 31.2).abs() < 1e-15);
        assert!((corollary_delta(-0.05f64, 6).unwrap() - 0.621 / 187.936).abs() < 1e-12);
        let c3 = corollary_delta(-0.25f64, 3).unwrap();
        let b3 = exponent_bundle(-0.25f64, 3).unwrap().delta;
        assert!((c3 - b3).abs() < 1e-15);
    }

    #[test]
    fn corollary_matches_bundle_on_random_a() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in 3..=7usize {
            let (lo, hi) = corollary_range(k).unwrap();
            for _ in 0..100 {
                let a = rng.gen_range(lo * 0.999..hi - 1e-6);
                let want = corollary_delta(a, k).unwrap();
                let got = exponent_bundle(a, k).unwrap();
                assert!(
                    (want - got.delta).abs() <= 1e-12,
                    "k={k} a={a}: {want} vs {}",
                    got.delta
                );
                assert!(got.delta > 0.0);
                assert!(got.delta < got.alpha / (2.0 * got.b) + 1e-12);
            }
        }
    }

    #[test]
    fn auto_cutoff_example() {
        // a = -0.25, k = 3: 2b + 2alpha = 7/2, so y = T^{2/7}
        let t = 2f64.powi(20);
        let y = auto_cutoff(-0.25f64, 3, t).unwrap();
        assert_eq!(y, t.powf(2.0 / 7.0).round() as u64);
        assert_eq!(y, 53);
    }
}
