//! The truncated series s_{k;l}(y) over balanced sqrt-sum tuples, and the
//! moment constants B_k and C_k built from it.
//!
//! Balanced tuples decompose by squarefree kernel: within each class d the
//! signed coefficient sums must cancel. The series is therefore computed by
//! a per-class convolution (weights of tuples with a given c-sum) combined
//! across classes, never by scanning k-fold tuples. Results match the
//! enumeration path exactly at small cutoffs; tests pin that down.

use crate::error::{Error, Result};
use crate::sigma::SigmaTable;

/// Partial sum of the balance series with cutoff y and a fitted tail bound.
#[derive(Clone, Debug)]
pub struct SeriesEstimate {
    pub k: usize,
    pub l: usize,
    pub a: f64,
    pub y: u64,
    pub value: f64,
    /// C_fit * y^{-1/2-a}; C_fit from the last three cutoff doublings.
    pub tail_bound: f64,
    /// Number of solution tuples the value sums over.
    pub terms_used: u64,
}

/// Squarefree flags up to y.
fn squarefree_sieve(y: usize) -> Vec<bool> {
    let mut sf = vec![true; y + 1];
    let mut q = 2usize;
    while q * q <= y {
        let mut m = q * q;
        while m <= y {
            sf[m] = false;
            m += q * q;
        }
        q += 1;
    }
    sf
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut out = 1.0f64;
    for i in 0..k {
        out = out * (n - i) as f64 / (i + 1) as f64;
    }
    out
}

/// Sum over ordered (left + right)-tuples, all entries <= y, whose sqrt sums
/// balance, of the product of w(n_j) where w(n) = sigma_a(n) / n^{3/4+a/2}.
/// `unit_weights` replaces w by 1 to count solutions instead.
fn balanced_sum(
    table: &SigmaTable<f64>,
    left: usize,
    right: usize,
    y: u64,
    unit_weights: bool,
) -> Result<f64> {
    if y as usize > table.n_max {
        return Err(Error::range(format!(
            "cutoff y = {y} exceeds table n_max = {}",
            table.n_max
        )));
    }
    let y = y as usize;
    let a = table.a;
    let expo = 0.75 + a / 2.0;
    let sf = squarefree_sieve(y);
    let pm = left.max(right);

    // f[i][j]: weighted count with i left and j right positions assigned
    let mut f = vec![vec![0.0f64; right + 1]; left + 1];
    f[0][0] = 1.0;

    for d in 1..=y {
        if !sf[d] {
            continue;
        }
        let cmax = {
            let mut c = ((y / d) as f64).sqrt() as usize;
            while (c + 1) * (c + 1) * d <= y {
                c += 1;
            }
            while c * c * d > y {
                c -= 1;
            }
            c
        };
        if cmax == 0 {
            continue;
        }
        // weights of the class members c^2 d, indexed by c
        let u: Vec<f64> = (1..=cmax)
            .map(|c| {
                let n = c * c * d;
                if unit_weights {
                    1.0
                } else {
                    table.sigma(n) / (n as f64).powf(expo)
                }
            })
            .collect();
        // conv[p][s] = sum over ordered p-tuples from the class with c-sum s
        let mut conv: Vec<Vec<f64>> = Vec::with_capacity(pm + 1);
        conv.push(vec![1.0]); // p = 0, s = 0
        for p in 1..=pm {
            let prev = &conv[p - 1];
            let mut cur = vec![0.0f64; p * cmax + 1];
            for (s_prev, &w_prev) in prev.iter().enumerate() {
                if w_prev == 0.0 {
                    continue;
                }
                for c in 1..=cmax {
                    cur[s_prev + c] += w_prev * u[c - 1];
                }
            }
            conv.push(cur);
        }
        // g[p][q] = balanced pair weight for p left, q right slots in the class
        let mut g = vec![vec![0.0f64; right + 1]; left + 1];
        for p in 1..=left {
            for q in 1..=right {
                let (sa, sb) = (&conv[p], &conv[q]);
                let mut acc = 0.0;
                let top = sa.len().min(sb.len());
                for s in 1..top {
                    acc += sa[s] * sb[s];
                }
                g[p][q] = acc;
            }
        }
        // fold the class into f (classes are independent; positions are
        // distinguishable, hence the binomial choice factors)
        let mut next = f.clone();
        for i in 0..=left {
            for j in 0..=right {
                if f[i][j] == 0.0 {
                    continue;
                }
                for p in 1..=(left - i) {
                    for q in 1..=(right - j) {
                        if g[p][q] == 0.0 {
                            continue;
                        }
                        next[i + p][j + q] += f[i][j]
                            * binomial(left - i, p)
                            * binomial(right - j, q)
                            * g[p][q];
                    }
                }
            }
        }
        f = next;
    }
    Ok(f[left][right])
}

/// s_{k;l}(sigma_a; y): the l-vs-(k-l) balance series truncated at y, with a
/// tail bound of the form C_fit * y^{-1/2-a} fitted from cutoff doublings.
pub fn s_kl(table: &SigmaTable<f64>, k: usize, l: usize, y: u64) -> Result<SeriesEstimate> {
    if !(1 <= l && l < k && k <= 8) {
        return Err(Error::domain(format!("need 1 <= l < k <= 8, got k={k} l={l}")));
    }
    if y < 1 {
        return Err(Error::domain("y must be >= 1"));
    }
    let value = balanced_sum(table, l, k - l, y, false)?;
    let terms = balanced_sum(table, l, k - l, y, true)?;
    // fit the tail constant over the last three doublings
    let a = table.a;
    let mut c_fit = 0.0f64;
    if y >= 16 {
        let mut prev = balanced_sum(table, l, k - l, y / 8, false)?;
        for yy in [y / 4, y / 2, y] {
            let cur = balanced_sum(table, l, k - l, yy, false)?;
            let scale = ((yy / 2) as f64).powf(0.5 + a);
            c_fit = c_fit.max((cur - prev).abs() * scale);
            prev = cur;
        }
    }
    Ok(SeriesEstimate {
        k,
        l,
        a,
        y,
        value,
        tail_bound: c_fit * (y as f64).powf(-0.5 - a),
        terms_used: terms.round() as u64,
    })
}

/// Series restricted to one sign pattern: positions split into the pattern's
/// plus and minus sides. Zero when the pattern has no minus sign.
pub fn pattern_sum(
    table: &SigmaTable<f64>,
    pattern: &crate::relations::SignPattern,
    y: u64,
) -> Result<f64> {
    let minus = pattern.l();
    let plus = pattern.k - minus;
    if minus == 0 || plus == 0 {
        // one-sided sums of positive square roots never vanish
        return Ok(0.0);
    }
    balanced_sum(table, plus, minus, y, false)
}

/// B_k at cutoff y: binomial/cosine-weighted combination of the s_{k;l}.
pub fn b_k_finite(table: &SigmaTable<f64>, k: usize, y: u64) -> Result<f64> {
    if !(2 <= k && k <= 8) {
        return Err(Error::domain(format!("k = {k} outside [2, 8]")));
    }
    let mut total = 0.0f64;
    for l in 1..k {
        let s = s_kl(table, k, l, y)?.value;
        let weight = (std::f64::consts::PI * (k as f64 - 2.0 * l as f64) / 4.0).cos();
        total += binomial(k - 1, l) * s * weight;
    }
    Ok(total)
}

/// Normalization convention for C_k.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CkConvention {
    /// B_k / ((sqrt2 pi)^k 2^{k-1}); the density in front of x^{k/4+ka/2}.
    Density,
    /// Density divided by p = (4+k+2ka)/4; the coefficient of T^p in the
    /// integrated moment. Default for main-term prediction.
    Integrated,
}

pub fn c_k(table: &SigmaTable<f64>, k: usize, y: u64, convention: CkConvention) -> Result<f64> {
    let b = b_k_finite(table, k, y)?;
    let a = table.a;
    let density = b / ((2f64.sqrt() * std::f64::consts::PI).powi(k as i32) * 2f64.powi(k as i32 - 1));
    Ok(match convention {
        CkConvention::Density => density,
        CkConvention::Integrated => {
            let p = (4.0 + k as f64 + 2.0 * k as f64 * a) / 4.0;
            density / p
        }
    })
}
