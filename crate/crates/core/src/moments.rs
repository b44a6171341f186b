//! Window integrals of Delta_a^k by per-unit-interval Gauss–Legendre
//! quadrature, main-term comparison, and exponent fitting.
//!
//! On every open interval (n, n+1) the integrand is the smooth closed form
//! (step constant minus the main terms) raised to the k-th power, so a fixed
//! modest quadrature order is far inside its accuracy budget; doubling the
//! order is the built-in error estimate. Integer endpoints are never
//! sampled, which sidesteps the half-weight convention.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::auto_cutoff;
use crate::fit::{fit_loglog, FitResult};
use crate::quad::{GaussLegendre, ALLOWED_ORDERS};
use crate::series::{c_k, CkConvention};
use crate::sigma::{DeltaEvaluator, SigmaTable};
use crate::sum::{pairwise_sum, Kahan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Window {
    /// [T, 2T]
    Dyadic,
    /// [1, T]
    FromOne,
}

/// One computed moment window with its predicted main term.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MomentRecord {
    pub a: f64,
    pub k: usize,
    pub t: f64,
    pub window: Window,
    pub value: f64,
    pub main_term: f64,
    /// value / main_term; NaN (serialized as null) when the main term is too
    /// small to divide by, e.g. odd k with near-cancelling B_k.
    pub ratio: f64,
    pub quad_order: usize,
    /// series cutoff used for the main-term constant
    pub y: u64,
}

const CHUNK: usize = 2048;

/// Sum over unit cells [n, n+1), n in [t0, t1), of the Gauss–Legendre
/// integral of `f(n, x)`. Chunked in fixed strides with a pairwise tail
/// reduction, so the result does not depend on the worker count.
pub fn integrate_cellwise<F>(t0: usize, t1: usize, order: usize, f: F) -> Result<f64>
where
    F: Fn(usize, f64) -> f64 + Sync,
{
    if !ALLOWED_ORDERS.contains(&order) {
        return Err(Error::Order(order));
    }
    if t1 <= t0 {
        return Err(Error::range(format!("empty cell range [{t0}, {t1})")));
    }
    let rule = GaussLegendre::<f64>::new(order)?;
    let n_cells = t1 - t0;
    let n_chunks = n_cells.div_ceil(CHUNK);
    let partials: Vec<f64> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let lo = t0 + ci * CHUNK;
            let hi = (lo + CHUNK).min(t1);
            let mut acc = Kahan::<f64>::new();
            for n in lo..hi {
                let mid = n as f64 + 0.5;
                let mut cell = 0.0f64;
                for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                    cell += w * f(n, mid + 0.5 * x);
                }
                acc.add(0.5 * cell);
            }
            acc.value()
        })
        .collect();
    Ok(pairwise_sum(&partials))
}

/// integral over [T, 2T] of Delta_a^k, T a positive integer power window.
pub fn integrate_power_window(
    k: usize,
    t: f64,
    ev: &DeltaEvaluator<'_, f64>,
    quad_order: usize,
) -> Result<f64> {
    if !(2..=7).contains(&k) {
        return Err(Error::domain(format!("k = {k} outside [2, 7]")));
    }
    if t.fract() != 0.0 || t < 1.0 {
        return Err(Error::range(format!("window start must be a positive integer, got {t}")));
    }
    let t0 = t as usize;
    if 2 * t0 > ev.table.n_max {
        return Err(Error::range(format!(
            "2T = {} exceeds the sieve capacity {}",
            2 * t0,
            ev.table.n_max
        )));
    }
    integrate_cellwise(t0, 2 * t0, quad_order, |n, x| {
        ev.delta_in_cell(n, x).powi(k as i32)
    })
}

/// Predicted main term of the dyadic window: the Integrated-convention value
/// C_density * ((2T)^p - T^p) / p with p = (4 + k + 2ka)/4, which is exactly
/// what integrating the density over the window yields.
pub fn dyadic_main_term(c_density: f64, a: f64, k: usize, t: f64) -> f64 {
    let p = (4.0 + k as f64 + 2.0 * k as f64 * a) / 4.0;
    c_density * ((2.0 * t).powf(p) - t.powf(p)) / p
}

/// One dyadic MomentRecord; `y` is the series cutoff behind the constant.
pub fn integrate_delta_power(
    k: usize,
    t: f64,
    ev: &DeltaEvaluator<'_, f64>,
    quad_order: usize,
    y: u64,
) -> Result<MomentRecord> {
    let a = ev.table.a;
    let value = integrate_power_window(k, t, ev, quad_order)?;
    let c_density = c_k(ev.table, k, y, CkConvention::Density)?;
    let main_term = dyadic_main_term(c_density, a, k, t);
    let ratio = if main_term.abs() < 1e-12 * value.abs().max(1e-300) {
        f64::NAN
    } else {
        value / main_term
    };
    Ok(MomentRecord {
        a,
        k,
        t,
        window: Window::Dyadic,
        value,
        main_term,
        ratio,
        quad_order,
        y,
    })
}

/// OLS fit of log |value| against log T over dyadic records. For dyadic
/// windows the model slope target is p = (4 + k + 2ka)/4.
pub fn fit_exponent(records: &[MomentRecord]) -> Result<FitResult<f64>> {
    if records.len() < 5 {
        return Err(Error::InsufficientData {
            need: 5,
            got: records.len(),
        });
    }
    let (a, k) = (records[0].a, records[0].k);
    for w in records.windows(2) {
        if w[1].a != a || w[1].k != k {
            return Err(Error::domain("records mix (a, k) pairs"));
        }
        if (w[1].t / w[0].t - 2.0).abs() > 1e-9 {
            return Err(Error::domain("records must be on doubling T"));
        }
    }
    let pairs: Vec<(f64, f64)> = records.iter().map(|r| (r.t, r.value)).collect();
    fit_loglog(&pairs, 5)
}

/// Series cutoff per window: the exponent-balancing choice T^{1/(2b+2alpha)}
/// for k >= 3, a
/// fixed convergent-tail cutoff for k = 2 (where no exponent bundle exists).
pub fn default_cutoff(a: f64, k: usize, t: f64, n_max: usize) -> u64 {
    if k >= 3 {
        if let Ok(y) = auto_cutoff(a, k, t) {
            return y.clamp(1, n_max as u64);
        }
    }
    (1u64 << 16).min(n_max as u64)
}

/// Records over a list of dyadic T plus the exponent fit.
pub fn moment_report(
    table: &SigmaTable<f64>,
    k: usize,
    t_list: &[f64],
    y: Option<u64>,
    quad_order: usize,
) -> Result<(Vec<MomentRecord>, FitResult<f64>)> {
    let ev = DeltaEvaluator::new(table);
    let mut records = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let cutoff = y.unwrap_or_else(|| default_cutoff(table.a, k, t, table.n_max));
        records.push(integrate_delta_power(k, t, &ev, quad_order, cutoff)?);
    }
    let fit = fit_exponent(&records)?;
    Ok((records, fit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sigma::build_sigma_table;

    #[test]
    fn constant_integrand_is_exact() {
        let c = 1.7f64;
        for k in 2..=7usize {
            let t = 512usize;
            let got = integrate_cellwise(t, 2 * t, 16, |_, _| c.powi(k as i32)).unwrap();
            let want = c.powi(k as i32) * t as f64;
            assert!((got - want).abs() <= 1e-12 * want.abs(), "k={k}");
        }
    }

    #[test]
    fn order_refinement_agreement() {
        let table = build_sigma_table(-0.25f64, 1 << 13).unwrap();
        let ev = DeltaEvaluator::new(&table);
        let t = (1 << 12) as f64;
        let v16 = integrate_power_window(2, t, &ev, 16).unwrap();
        let v32 = integrate_power_window(2, t, &ev, 32).unwrap();
        assert!((v16 - v32).abs() <= 1e-6 * v32.abs(), "{v16} vs {v32}");
    }

    #[test]
    fn midpoint_rule_oracle_k3() {
        let table = build_sigma_table(-0.25f64, 1 << 12).unwrap();
        let ev = DeltaEvaluator::new(&table);
        let t0 = 1usize << 11;
        let got = integrate_power_window(3, t0 as f64, &ev, 16).unwrap();
        // independent midpoint rule, 64 samples per unit interval
        let mut want = 0.0f64;
        for n in t0..(2 * t0) {
            for i in 0..64 {
                let x = n as f64 + (i as f64 + 0.5) / 64.0;
                want += ev.delta_in_cell(n, x).powi(3) / 64.0;
            }
        }
        assert!(
            (got - want).abs() <= 1e-4 * want.abs(),
            "{got} vs {want}"
        );
    }

    #[test]
    fn window_additivity() {
        let table = build_sigma_table(-0.25f64, 1 << 12).unwrap();
        let ev = DeltaEvaluator::new(&table);
        let t = 512usize;
        let a = integrate_cellwise(t, 2 * t, 16, |n, x| ev.delta_in_cell(n, x).powi(2)).unwrap();
        let b = integrate_cellwise(2 * t, 4 * t, 16, |n, x| ev.delta_in_cell(n, x).powi(2)).unwrap();
        let c = integrate_cellwise(t, 4 * t, 16, |n, x| ev.delta_in_cell(n, x).powi(2)).unwrap();
        assert!((a + b - c).abs() <= 1e-10 * c.abs());
    }

    #[test]
    fn scaling_by_constant() {
        let table = build_sigma_table(-0.25f64, 2048).unwrap();
        let ev = DeltaEvaluator::new(&table);
        let c = 3.0f64;
        for k in [2usize, 3] {
            let base =
                integrate_cellwise(512, 1024, 16, |n, x| ev.delta_in_cell(n, x).powi(k as i32))
                    .unwrap();
            let scaled = integrate_cellwise(512, 1024, 16, |n, x| {
                (c * ev.delta_in_cell(n, x)).powi(k as i32)
            })
            .unwrap();
            assert!((scaled - c.powi(k as i32) * base).abs() <= 1e-12 * scaled.abs());
        }
    }

    #[test]
    fn second_moment_positive() {
        let table = build_sigma_table(-0.4f64, 4096).unwrap();
        let ev = DeltaEvaluator::new(&table);
        assert!(integrate_power_window(2, 1024.0, &ev, 8).unwrap() > 0.0);
    }

    #[test]
    fn fit_synthetic_records() {
        let records: Vec<MomentRecord> = (0..6)
            .map(|i| {
                let t = 2f64.powi(10 + i);
                MomentRecord {
                    a: -0.25,
                    k: 2,
                    t,
                    window: Window::Dyadic,
                    value: 3.0 * t.powf(1.25),
                    main_term: 1.0,
                    ratio: 1.0,
                    quad_order: 16,
                    y: 100,
                }
            })
            .collect();
        let fit = fit_exponent(&records).unwrap();
        assert!((fit.slope - 1.25).abs() < 1e-10);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_guards() {
        let table = build_sigma_table(-0.25f64, 4096).unwrap();
        let ev = DeltaEvaluator::new(&table);
        let rec = integrate_delta_power(2, 1024.0, &ev, 8, 1024).unwrap();
        assert!(matches!(
            fit_exponent(&[rec]),
            Err(Error::InsufficientData { .. })
        ));
        let mut mixed = vec![rec; 5];
        mixed[3].k = 3;
        assert!(fit_exponent(&mixed).is_err());
    }

    #[test]
    fn unstable_ratio_flagged() {
        let table = build_sigma_table(-0.25f64, 4096).unwrap();
        let ev = DeltaEvaluator::new(&table);
        let mut rec = integrate_delta_power(2, 1024.0, &ev, 8, 1024).unwrap();
        assert!(rec.ratio.is_finite());
        // force a degenerate main term
        rec.main_term = 0.0;
        let ratio = if rec.main_term.abs() < 1e-12 * rec.value.abs() {
            f64::NAN
        } else {
            rec.value / rec.main_term
        };
        assert!(ratio.is_nan());
    }

    #[test]
    fn guards() {
        let table = build_sigma_table(-0.25f64, 1024).unwrap();
        let ev = DeltaEvaluator::new(&table);
        assert!(integrate_power_window(2, 768.0, &ev, 16).is_err()); // 2T > n_max
        assert!(integrate_power_window(1, 256.0, &ev, 16).is_err());
        assert!(integrate_power_window(2, 256.0, &ev, 12).is_err());
        assert!(integrate_power_window(2, 256.5, &ev, 16).is_err());
    }
}
