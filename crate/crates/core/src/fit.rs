//! Ordinary least squares on (log T, log |value|) pairs, for empirical
//! growth-exponent checks.

use crate::error::{Error, Result};
use crate::real::{ru, Real};

#[derive(Clone, Debug)]
pub struct FitResult<R: Real> {
    pub slope: R,
    pub intercept: R,
    pub r_squared: R,
    pub points: Vec<(R, R)>,
}

/// OLS fit of y against x. Needs at least `min_points` pairs.
pub fn fit_line<R: Real>(points: &[(R, R)], min_points: usize) -> Result<FitResult<R>> {
    if points.len() < min_points {
        return Err(Error::InsufficientData {
            need: min_points,
            got: points.len(),
        });
    }
    let n = ru::<R>(points.len());
    let sx: R = points.iter().map(|p| p.0).fold(R::zero(), |a, b| a + b);
    let sy: R = points.iter().map(|p| p.1).fold(R::zero(), |a, b| a + b);
    let mx = sx / n;
    let my = sy / n;
    let mut sxx = R::zero();
    let mut sxy = R::zero();
    let mut syy = R::zero();
    for &(x, y) in points {
        let dx = x - mx;
        let dy = y - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == R::zero() {
        return Err(Error::domain("all x values identical"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == R::zero() {
        R::one()
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
        points: points.to_vec(),
    })
}

/// OLS on (ln x, ln |y|); points with y = 0 are rejected.
pub fn fit_loglog<R: Real>(pairs: &[(R, R)], min_points: usize) -> Result<FitResult<R>> {
    let mut pts = Vec::with_capacity(pairs.len());
    for &(x, y) in pairs {
        if x <= R::zero() || y.abs() == R::zero() {
            return Err(Error::domain("log-log fit needs x > 0 and y != 0"));
        }
        pts.push((x.ln(), y.abs().ln()));
    }
    fit_line(&pts, min_points)
}

/// Convenience: slope of log2 |y| against log2 x (same slope as natural log).
pub fn loglog_slope<R: Real>(pairs: &[(R, R)]) -> Result<R> {
    Ok(fit_loglog(pairs, 2)?.slope)
}
