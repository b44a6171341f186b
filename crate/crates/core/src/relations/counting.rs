use crate::error::{Error, Result};

use super::fixed::{alpha_fixed, alpha_to_f64, sqrt_fixed_i128, FRAC_BITS};
use super::kernel::SignPattern;

const LEAF_CAP: u128 = 100_000_000;

/// Number of tuples (n_1..n_k), N_j < n_j <= 2N_j, with |alpha| < delta
/// (strict; exact zeros count). Exhaustive scan in 80-bit fixed point, with
/// a high-precision recheck inside the floor-error band around the boundary.
pub fn count_near_solutions(n_los: &[u64], pattern: &SignPattern, delta: f64) -> Result<u64> {
    let k = pattern.k;
    if n_los.len() != k {
        return Err(Error::domain("box dimension must equal pattern k"));
    }
    if pattern.is_all_plus() {
        return Err(Error::domain("pattern must contain at least one minus sign"));
    }
    if n_los.iter().any(|&n| n <= 1) {
        return Err(Error::domain("all N_j must exceed 1"));
    }
    let e_max = *n_los.iter().max().unwrap();
    if !(delta > 0.0 && delta <= (e_max as f64).sqrt()) {
        return Err(Error::domain(format!(
            "delta = {delta} outside (0, sqrt(max N_j)]"
        )));
    }
    let cells: u128 = n_los.iter().map(|&n| n as u128).product();
    if cells > LEAF_CAP {
        return Err(Error::capacity(format!(
            "box has {cells} cells (cap {LEAF_CAP})"
        )));
    }

    let signs = pattern.signs();
    // signed fixed-point roots per position
    let axes: Vec<Vec<i128>> = n_los
        .iter()
        .zip(&signs)
        .map(|(&lo, &s)| {
            ((lo + 1)..=(2 * lo))
                .map(|n| s as i128 * sqrt_fixed_i128(n))
                .collect()
        })
        .collect();
    let delta_fx = (delta * 2f64.powi(FRAC_BITS as i32)) as i128;
    let band = (k + 2) as i128;

    let mut count = 0u64;
    let mut ambiguous: Vec<Vec<u64>> = Vec::new();
    let mut idx = vec![0usize; k];
    // partial[j] = sum of the first j coordinates
    let mut partial = vec![0i128; k + 1];
    let mut j = 0usize;
    loop {
        if j == k {
            let m = partial[k].unsigned_abs() as i128;
            if (m - delta_fx).abs() <= band {
                ambiguous.push(
                    idx.iter()
                        .zip(n_los)
                        .map(|(&i, &lo)| lo + 1 + i as u64)
                        .collect(),
                );
            } else if m < delta_fx {
                count += 1;
            }
            // step back and advance
            j -= 1;
            loop {
                idx[j] += 1;
                if idx[j] < axes[j].len() {
                    break;
                }
                idx[j] = 0;
                if j == 0 {
                    // resolve boundary stragglers at higher precision
                    for ns in &ambiguous {
                        let alpha = alpha_fixed(ns, &signs, 192);
                        if alpha_to_f64(&alpha, 192).abs() < delta {
                            count += 1;
                        }
                    }
                    return Ok(count);
                }
                j -= 1;
            }
        }
        partial[j + 1] = partial[j] + axes[j][idx[j]];
        j += 1;
    }
}
