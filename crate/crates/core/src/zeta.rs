//! Riemann zeta at real arguments via Euler–Maclaurin summation.
//!
//! Only real s away from the pole at 1 is supported; that is all the rest of
//! the crate needs (the constants zeta(1-a), zeta(1+a), zeta(-a) for
//! -1/2 < a < 0, plus classical spot values for self-tests). An independent
//! alternating-eta route is provided as a cross-check for 0 < s, s != 1.

use crate::error::{Error, Result};
use crate::real::{r, ru, Real};
use crate::sum::Kahan;

/// Bernoulli numbers B_2, B_4, ..., B_30 as (numerator, denominator).
const BERNOULLI: [(f64, f64); 15] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
    (8615841276005.0, 14322.0),
];

const MAX_TRUNCATION: usize = 4_000_000;

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// |B_{2j}/(2j)! * s(s+1)...(s+2j-2) * N^{-s-2j+1}| for the remainder bound
/// and the correction terms themselves (signed).
fn em_term(s: f64, j: usize, n: f64) -> f64 {
    let (num, den) = BERNOULLI[j - 1];
    let mut rising = 1.0;
    for i in 0..(2 * j - 1) {
        rising *= s + i as f64;
    }
    num / den / factorial(2 * j) * rising * n.powf(-s - 2.0 * j as f64 + 1.0)
}

/// Pick (N, m) so the standard Euler–Maclaurin remainder bound meets `tol`.
fn choose_parameters(s: f64, tol: f64) -> Option<(usize, usize)> {
    for m in [6usize, 10, 12, 14] {
        // remainder is of the order of the first omitted term
        if s + 2.0 * m as f64 + 1.0 <= 1.0 {
            continue;
        }
        let mut n = 8usize;
        while n <= MAX_TRUNCATION {
            if em_term(s, m + 1, n as f64).abs() <= tol * 0.5 {
                return Some((n, m));
            }
            n *= 2;
        }
    }
    None
}

/// Evaluate zeta(s) for real s != 1 with absolute error at most
/// `target_abs_error`, by Euler–Maclaurin summation.
pub fn zeta_real<R: Real>(s: R, target_abs_error: f64) -> Result<R> {
    let sf = s.to_f64().ok_or_else(|| Error::domain("s must be finite"))?;
    if !sf.is_finite() {
        return Err(Error::domain("s must be finite"));
    }
    if (sf - 1.0).abs() <= 1e-6 {
        return Err(Error::PoleAtOne(sf));
    }
    if !(target_abs_error > 0.0 && target_abs_error <= 1e-6) {
        return Err(Error::domain("target_abs_error must lie in (0, 1e-6]"));
    }
    let (n, m) = choose_parameters(sf, target_abs_error).ok_or(Error::NonConvergent {
        target: target_abs_error,
        achieved: em_term(sf, 15, MAX_TRUNCATION as f64).abs(),
    })?;

    let mut head = Kahan::<R>::new();
    for i in 1..n {
        head.add(ru::<R>(i).powf(-s));
    }
    let nr = ru::<R>(n);
    let one = R::one();
    let mut value = head.value();
    value = value + nr.powf(one - s) / (s - one);
    value = value + nr.powf(-s) / r(2.0);
    for j in 1..=m {
        value = value + r::<R>(em_term(sf, j, n as f64));
    }
    Ok(value)
}

/// Alternating-eta route: zeta(s) = eta(s) / (1 - 2^{1-s}), with eta summed by
/// the Cohen–Rodriguez Villegas–Zagier Chebyshev acceleration. Valid for real
/// s > 0, s != 1. Independent of the Euler–Maclaurin path; used as its oracle.
pub fn zeta_eta<R: Real>(s: R) -> Result<R> {
    let sf = s.to_f64().ok_or_else(|| Error::domain("s must be finite"))?;
    if (sf - 1.0).abs() <= 1e-6 {
        return Err(Error::PoleAtOne(sf));
    }
    if sf <= 0.0 {
        return Err(Error::domain("eta route needs s > 0"));
    }
    let n = 40usize;
    let mut d = vec![0.0f64; n + 1];
    let mut term = 1.0f64; // (n+i-1)! 4^i / ((n-i)! (2i)!) at i = 0 is 1... built incrementally
    // d_k = n * sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!)
    let mut acc = 0.0f64;
    for i in 0..=n {
        if i > 0 {
            term *= 4.0 * (n + i - 1) as f64 * (n - i + 1) as f64
                / ((2 * i) as f64 * (2 * i - 1) as f64);
        }
        acc += term;
        d[i] = n as f64 * acc;
    }
    let mut eta = Kahan::<R>::new();
    let dn = d[n];
    for k in 0..n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = r::<R>(sign * (dn - d[k]) / dn);
        eta.add(coeff * ru::<R>(k + 1).powf(-s));
    }
    let denom = R::one() - r::<R>(2.0).powf(R::one() - s);
    Ok(eta.value() / denom)
}

/// The three zeta values that enter the definition of the error term, for one
/// fixed a in (-1/2, 0).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZetaConstants<R: Real> {
    pub a: R,
    /// zeta(1-a), the coefficient of the linear main term; > 1.
    pub zeta_one_minus_a: R,
    /// zeta(1+a); 1+a lies in (1/2, 1) where zeta is negative.
    pub zeta_one_plus_a: R,
    /// zeta(-a); -a lies in (0, 1/2) where zeta is negative.
    pub zeta_minus_a: R,
    pub precision_bits: u32,
}

/// Absolute error target for the constants.
const CONSTANTS_TOL: f64 = 1e-15;

pub fn zeta_constants<R: Real>(a: R) -> Result<ZetaConstants<R>> {
    let af = a.to_f64().unwrap_or(f64::NAN);
    if !(af > -0.5 && af < 0.0) {
        return Err(Error::domain(format!("a must lie in (-1/2, 0), got {af}")));
    }
    let one = R::one();
    Ok(ZetaConstants {
        a,
        zeta_one_minus_a: zeta_real(one - a, CONSTANTS_TOL)?,
        zeta_one_plus_a: zeta_real(one + a, CONSTANTS_TOL)?,
        zeta_minus_a: zeta_real(-a, CONSTANTS_TOL)?,
        precision_bits: 50,
    })
}
