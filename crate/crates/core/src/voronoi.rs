//! Truncated oscillating-series approximation to Delta_a(x): the cutoff-y
//! cosine sum with amplitude x^{1/4+a/2}/(sqrt2 pi), and mean-square
//! residuals of Delta against it over dyadic windows.
//!
//! The phase 4 pi sqrt(n x) is large enough at interesting x that the last
//! bits of the f64 phase matter; an optional double-double phase path bounds
//! that rounding. The standard path is the default and agrees with it to
//! well below the residual sizes the sweep measures.

use std::f64::consts::{FRAC_PI_4, PI};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quad::{GaussLegendre, ALLOWED_ORDERS};
use crate::sigma::{DeltaEvaluator, SigmaTable};
use crate::sum::pairwise_sum;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhaseMode {
    /// plain f64 phase
    Standard,
    /// double-double phase with range reduction mod 2 pi
    Extended,
}

/// The truncated series with coefficients sigma_a(n)/n^{3/4+a/2} frozen at
/// construction.
pub struct VoronoiSeries<'t> {
    pub table: &'t SigmaTable<f64>,
    pub y: u64,
    pub phase: PhaseMode,
    coeff: Vec<f64>,
    sqrt_hi: Vec<f64>,
    sqrt_lo: Vec<f64>,
}

// ---- double-double helpers (hi + lo with |lo| <= ulp(hi)/2) ----

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[inline]
fn dd_mul(ah: f64, al: f64, bh: f64, bl: f64) -> (f64, f64) {
    let (p, e) = two_prod(ah, bh);
    let lo = e + ah * bl + al * bh;
    let s = p + lo;
    (s, (p - s) + lo)
}

/// sqrt of an exactly-representable nonnegative x, as a double-double.
#[inline]
fn dd_sqrt(x: f64) -> (f64, f64) {
    let h = x.sqrt();
    if h == 0.0 {
        return (0.0, 0.0);
    }
    let r = (-h).mul_add(h, x);
    (h, r / (2.0 * h))
}

const FOUR_PI: (f64, f64) = (12.566370614359172, 4.898587196589413e-16);
const TWO_PI: (f64, f64) = (6.283185307179586, 2.4492935982947064e-16);
const PI_4_DD: (f64, f64) = (FRAC_PI_4, 3.061616997868383e-17);

/// cos(4 pi s - pi/4) with the product s given in double-double form.
#[inline]
fn cos_phase_dd(sh: f64, sl: f64) -> f64 {
    let (ph, pl) = dd_mul(sh, sl, FOUR_PI.0, FOUR_PI.1);
    let q = (ph / TWO_PI.0).round();
    let (rh0, rl0) = two_sum(ph - q * TWO_PI.0, -q * TWO_PI.1 + pl);
    let (rh, rl) = two_sum(rh0 - PI_4_DD.0, rl0 - PI_4_DD.1);
    rh.cos() - rl * rh.sin()
}

impl<'t> VoronoiSeries<'t> {
    pub fn new(table: &'t SigmaTable<f64>, y: u64, phase: PhaseMode) -> Result<Self> {
        if y < 1 || y as usize > table.n_max {
            return Err(Error::range(format!(
                "cutoff y = {y} outside [1, {}]",
                table.n_max
            )));
        }
        let expo = 0.75 + table.a / 2.0;
        let mut coeff = Vec::with_capacity(y as usize);
        let mut sqrt_hi = Vec::with_capacity(y as usize);
        let mut sqrt_lo = Vec::with_capacity(y as usize);
        for n in 1..=y as usize {
            coeff.push(table.sigma(n) / (n as f64).powf(expo));
            let (h, l) = dd_sqrt(n as f64);
            sqrt_hi.push(h);
            sqrt_lo.push(l);
        }
        Ok(VoronoiSeries {
            table,
            y,
            phase,
            coeff,
            sqrt_hi,
            sqrt_lo,
        })
    }

    #[inline]
    pub fn amplitude(&self, x: f64) -> f64 {
        x.powf(0.25 + self.table.a / 2.0) / (2f64.sqrt() * PI)
    }

    /// Cosine sum over n in (from, to], shared by point evaluation and the
    /// sweep so both produce bitwise-identical partial sums.
    #[inline]
    fn cos_sum_segment(&self, x: f64, sx: (f64, f64), from: usize, to: usize) -> f64 {
        debug_assert!(to <= self.coeff.len());
        let mut acc = 0.0f64;
        match self.phase {
            PhaseMode::Standard => {
                let c4 = 4.0 * PI * x.sqrt();
                for m in from..to {
                    acc += self.coeff[m] * (c4 * self.sqrt_hi[m] - FRAC_PI_4).cos();
                }
            }
            PhaseMode::Extended => {
                for m in from..to {
                    let (sh, sl) = dd_mul(self.sqrt_hi[m], self.sqrt_lo[m], sx.0, sx.1);
                    acc += self.coeff[m] * cos_phase_dd(sh, sl);
                }
            }
        }
        acc
    }

    /// The truncated-series value at x with this cutoff.
    pub fn eval(&self, x: f64) -> f64 {
        let sx = dd_sqrt(x);
        self.amplitude(x) * self.cos_sum_segment(x, sx, 0, self.y as usize)
    }

    /// Integral over [T, 2T] of (delta(n, x) - series(x))^2 at every cutoff
    /// in `cutoffs` (ascending, all <= self.y), sharing one pass over the
    /// series terms. `delta` receives the cell index n and the point x in
    /// (n, n+1). Chunked with a pairwise tail reduction, so the result is
    /// independent of the worker count.
    pub fn residual_sweep<F>(
        &self,
        t: f64,
        cutoffs: &[u64],
        quad_order: usize,
        delta: F,
    ) -> Result<Vec<f64>>
    where
        F: Fn(usize, f64) -> f64 + Sync,
    {
        if !ALLOWED_ORDERS.contains(&quad_order) {
            return Err(Error::Order(quad_order));
        }
        if t.fract() != 0.0 || t < 1.0 {
            return Err(Error::range(format!(
                "window start must be a positive integer, got {t}"
            )));
        }
        if cutoffs.is_empty() {
            return Err(Error::domain("no cutoffs given"));
        }
        for w in cutoffs.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::domain("cutoffs must be strictly ascending"));
            }
        }
        if cutoffs[0] < 1 || *cutoffs.last().unwrap() > self.y {
            return Err(Error::range(format!(
                "cutoffs must lie in [1, {}]",
                self.y
            )));
        }
        let rule = GaussLegendre::<f64>::new(quad_order)?;
        let t0 = t as usize;
        let t1 = 2 * t0;
        const CHUNK: usize = 256;
        let n_chunks = (t1 - t0).div_ceil(CHUNK);
        let nc = cutoffs.len();
        let partials: Vec<Vec<f64>> = (0..n_chunks)
            .into_par_iter()
            .map(|ci| {
                let lo = t0 + ci * CHUNK;
                let hi = (lo + CHUNK).min(t1);
                let mut sums = vec![0.0f64; nc];
                for n in lo..hi {
                    let mid = n as f64 + 0.5;
                    for (&node, &w) in rule.nodes.iter().zip(&rule.weights) {
                        let x = mid + 0.5 * node;
                        let amp = self.amplitude(x);
                        let d = delta(n, x);
                        let sx = dd_sqrt(x);
                        let mut acc = 0.0f64;
                        let mut start = 0usize;
                        for (idx, &cut) in cutoffs.iter().enumerate() {
                            acc += self.cos_sum_segment(x, sx, start, cut as usize);
                            start = cut as usize;
                            let r = d - amp * acc;
                            sums[idx] += 0.5 * w * r * r;
                        }
                    }
                }
                sums
            })
            .collect();
        let mut out = Vec::with_capacity(nc);
        for idx in 0..nc {
            let col: Vec<f64> = partials.iter().map(|p| p[idx]).collect();
            out.push(pairwise_sum(&col));
        }
        Ok(out)
    }

    /// Integral over [T, 2T] of (Delta_a - series)^2 at this cutoff.
    pub fn residual_second_moment(
        &self,
        t: f64,
        ev: &DeltaEvaluator<'_, f64>,
        quad_order: usize,
    ) -> Result<f64> {
        let t0 = t as usize;
        if t.fract() == 0.0 && 2 * t0 > ev.table.n_max {
            return Err(Error::range(format!(
                "2T = {} exceeds the sieve capacity {}",
                2 * t0,
                ev.table.n_max
            )));
        }
        Ok(self.residual_sweep(t, &[self.y], quad_order, |n, x| ev.delta_in_cell(n, x))?[0])
    }
}

/// The analytic shape of the residual window integral, T^{3/2+a} y^{-1/2-a},
/// without its constant. Useful for normalizing sweep output.
pub fn residual_scale(a: f64, t: f64, y: u64) -> f64 {
    t.powf(1.5 + a) * (y as f64).powf(-0.5 - a)
}
