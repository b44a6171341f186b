use crate::error::{Error, Result};

use super::fixed::{alpha_fixed, alpha_to_f64, i128_to_f64, sqrt_fixed_i128};
use super::kernel::SignPattern;
use super::sqrt_sum_is_zero;

/// min |alpha| over all tuples with n_j <= m_max and alpha != 0 (exact test).
///
/// Meet-in-the-middle: the first floor(k/2) positions are enumerated into a
/// list sorted by fixed-point partial sum, the remaining positions are
/// streamed and matched by binary search. Candidates inside the fixed-point
/// noise band are re-evaluated exactly / at higher precision.
pub fn min_nonzero_gap(k: usize, m_max: u64, pattern: &SignPattern) -> Result<f64> {
    if !(2 <= k && k <= 5) {
        return Err(Error::domain(format!("k = {k} outside [2, 5]")));
    }
    if pattern.k != k {
        return Err(Error::domain("pattern k mismatch"));
    }
    let cap = match k {
        2 | 3 => 3000,
        4 => 300,
        _ => 60,
    };
    if m_max < 2 || m_max > cap {
        return Err(Error::capacity(format!(
            "m_max = {m_max} outside [2, {cap}] for k = {k}"
        )));
    }

    let signs = pattern.signs();
    let roots: Vec<i128> = (1..=m_max).map(sqrt_fixed_i128).collect();
    let h = k / 2; // stored half

    // stored side: (signed partial sum, tuple code base m_max)
    let mut stored: Vec<(i128, u64)> = Vec::with_capacity((m_max as usize).pow(h as u32));
    let mut tuple = vec![1u64; h];
    loop {
        let mut sum = 0i128;
        let mut code = 0u64;
        for (j, &n) in tuple.iter().enumerate() {
            sum += signs[j] as i128 * roots[n as usize - 1];
            code = code * m_max + (n - 1);
        }
        stored.push((sum, code));
        if !advance(&mut tuple, m_max) {
            break;
        }
    }
    stored.sort_unstable();

    let decode = |mut code: u64| -> Vec<u64> {
        let mut out = vec![0u64; h];
        for slot in out.iter_mut().rev() {
            *slot = code % m_max + 1;
            code /= m_max;
        }
        out
    };

    let noise = k as i128; // floor error bound in ulps
    let mut best = f64::INFINITY;

    let mut stream = vec![1u64; k - h];
    loop {
        let mut ssum = 0i128;
        for (j, &n) in stream.iter().enumerate() {
            ssum += signs[h + j] as i128 * roots[n as usize - 1];
        }
        let target = -ssum;
        let idx = stored.partition_point(|&(v, _)| v < target);

        // walk outward in both directions until the first nonzero candidate
        for dir in [0usize, 1] {
            let mut step = 0usize;
            loop {
                let pos = if dir == 0 {
                    if idx + step >= stored.len() {
                        break;
                    }
                    idx + step
                } else {
                    if step + 1 > idx {
                        break;
                    }
                    idx - 1 - step
                };
                let (v, code) = stored[pos];
                let m = (v + ssum).unsigned_abs();
                if m as f64 / 2f64.powi(80) >= best {
                    break;
                }
                if m <= noise as u128 {
                    let mut ns = decode(code);
                    ns.extend_from_slice(&stream);
                    if sqrt_sum_is_zero(&ns, pattern) {
                        step += 1;
                        continue; // exact zero, keep walking
                    }
                    // tiny but nonzero: settle at higher precision
                    let alpha = alpha_fixed(&ns, &signs, 192);
                    let val = alpha_to_f64(&alpha, 192);
                    if val < best {
                        best = val;
                    }
                } else {
                    let val = i128_to_f64((v + ssum) as i128);
                    if val < best {
                        best = val;
                    }
                }
                break;
            }
        }
        if !advance(&mut stream, m_max) {
            break;
        }
    }
    Ok(best)
}

fn advance(tuple: &mut [u64], y: u64) -> bool {
    for slot in tuple.iter_mut().rev() {
        if *slot < y {
            *slot += 1;
            return true;
        }
        *slot = 1;
    }
    false
}
