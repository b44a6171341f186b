//! Fixed-point square roots. sqrt(n) is represented as
//! floor(sqrt(n * 4^frac_bits)), i.e. an integer holding frac_bits fractional
//! bits, so signed sums of square roots become exact integer sums up to a
//! floor error below one ulp per term.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// Default working precision for magnitude evaluation. The smallest gaps the
/// gap lemma allows at the supported ranges are around 1e-14; 80 fractional
/// bits leave them 10^10 ulps wide.
pub const FRAC_BITS: u32 = 80;

/// floor(sqrt(n) * 2^frac_bits) as a big integer.
pub fn sqrt_fixed(n: u64, frac_bits: u32) -> BigInt {
    (BigInt::from(n) << (2 * frac_bits)).sqrt()
}

/// Signed fixed-point sum of sqrt(n_j) with the given signs.
/// |true alpha * 2^frac_bits - result| < k.
pub fn alpha_fixed(ns: &[u64], signs: &[i64], frac_bits: u32) -> BigInt {
    debug_assert_eq!(ns.len(), signs.len());
    let mut acc = BigInt::zero();
    for (&n, &s) in ns.iter().zip(signs) {
        let root = sqrt_fixed(n, frac_bits);
        if s >= 0 {
            acc += root;
        } else {
            acc -= root;
        }
    }
    acc
}

/// i128 variant at [`FRAC_BITS`]; callers must keep n small enough that
/// k * sqrt(n) * 2^80 fits (n <= 2^48 is comfortably safe for k <= 8).
pub fn alpha_fixed_i128(roots: &[i128]) -> i128 {
    roots.iter().sum()
}

/// floor(sqrt(n) * 2^FRAC_BITS) as i128.
pub fn sqrt_fixed_i128(n: u64) -> i128 {
    sqrt_fixed(n, FRAC_BITS)
        .to_i128()
        .expect("sqrt fixed point must fit i128")
}

/// Magnitude of a fixed-point alpha as f64.
pub fn alpha_to_f64(alpha: &BigInt, frac_bits: u32) -> f64 {
    let mag = alpha.abs().to_f64().unwrap_or(f64::INFINITY);
    mag / 2f64.powi(frac_bits as i32)
}

pub(crate) fn i128_to_f64(alpha: i128) -> f64 {
    alpha.unsigned_abs() as f64 / 2f64.powi(FRAC_BITS as i32)
}
