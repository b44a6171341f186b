use std::collections::HashMap;

use crate::error::{Error, Result};

use super::fixed::{alpha_fixed, alpha_to_f64};
use super::kernel::{kernel_decompose, SignPattern};

/// A signed k-tuple with its sqrt-sum classification.
#[derive(Clone, Debug)]
pub struct RelationTuple {
    pub ns: Vec<u64>,
    pub pattern: SignPattern,
    /// Decided by kernel algebra, never by floating comparison.
    pub alpha_exact_zero: bool,
    /// High-precision |alpha| when nonzero, 0.0 when exact zero.
    pub alpha_value: f64,
}

impl RelationTuple {
    pub fn classify(ns: Vec<u64>, pattern: SignPattern) -> Result<Self> {
        if ns.len() != pattern.k {
            return Err(Error::domain("tuple length must equal pattern k"));
        }
        let zero = sqrt_sum_is_zero(&ns, &pattern);
        let alpha_value = if zero {
            0.0
        } else {
            let alpha = alpha_fixed(&ns, &pattern.signs(), 128);
            alpha_to_f64(&alpha, 128)
        };
        Ok(RelationTuple {
            ns,
            pattern,
            alpha_exact_zero: zero,
            alpha_value,
        })
    }
}

/// True iff sum of signed sqrt(n_j) vanishes, decided exactly: group by
/// squarefree kernel and require every class's signed c-sum to be zero.
pub fn sqrt_sum_is_zero(ns: &[u64], pattern: &SignPattern) -> bool {
    debug_assert_eq!(ns.len(), pattern.k);
    let mut classes: HashMap<u64, i64> = HashMap::new();
    for (&n, &s) in ns.iter().zip(pattern.signs().iter()) {
        let kf = kernel_decompose(n);
        *classes.entry(kf.d).or_insert(0) += s * kf.c as i64;
    }
    classes.values().all(|&v| v == 0)
}

/// Signature of a tuple side: sorted (kernel, c-sum) pairs, zero classes
/// dropped. Two sides balance exactly when their signatures are equal.
fn signature(ns: &[u64], kernels: &[(u64, u64)]) -> Vec<(u64, u64)> {
    let mut classes: HashMap<u64, u64> = HashMap::new();
    for &n in ns {
        let (c, d) = kernels[n as usize - 1];
        *classes.entry(d).or_insert(0) += c;
    }
    let mut sig: Vec<(u64, u64)> = classes.into_iter().collect();
    sig.sort_unstable();
    sig
}

const WORK_CAP: u64 = 200_000_000;
const SOLUTION_CAP: usize = 2_000_000;

/// All ordered k-tuples (n_1..n_k), n_j <= y, with
/// sqrt(n_1)+...+sqrt(n_l) = sqrt(n_{l+1})+...+sqrt(n_k).
///
/// Meet-in-the-middle: hash the exact per-class c-sum signature of every
/// left half, then scan right halves. Output is sorted lexicographically.
pub fn enumerate_solutions(k: usize, l: usize, y: u64) -> Result<Vec<Vec<u64>>> {
    if !(2 <= k && k <= 8) {
        return Err(Error::domain(format!("k = {k} outside [2, 8]")));
    }
    if !(1 <= l && l < k) {
        return Err(Error::domain(format!("l = {l} outside [1, k-1]")));
    }
    if y < 1 {
        return Err(Error::domain("y must be >= 1"));
    }
    let r = k - l;
    let work = (y as u128).pow(l as u32) + (y as u128).pow(r as u32);
    if work > WORK_CAP as u128 {
        return Err(Error::capacity(format!(
            "enumeration would scan ~{work} tuples (cap {WORK_CAP})"
        )));
    }
    let kernels: Vec<(u64, u64)> = (1..=y)
        .map(|n| {
            let kf = kernel_decompose(n);
            (kf.c, kf.d)
        })
        .collect();

    // hash the smaller side
    let (hash_len, scan_len, hash_is_left) = if l <= r { (l, r, true) } else { (r, l, false) };

    let mut table: HashMap<Vec<(u64, u64)>, Vec<Vec<u64>>> = HashMap::new();
    let mut tuple = vec![1u64; hash_len];
    loop {
        table
            .entry(signature(&tuple, &kernels))
            .or_default()
            .push(tuple.clone());
        if !advance(&mut tuple, y) {
            break;
        }
    }

    let mut out: Vec<Vec<u64>> = Vec::new();
    let mut tuple = vec![1u64; scan_len];
    loop {
        if let Some(mates) = table.get(&signature(&tuple, &kernels)) {
            for mate in mates {
                if out.len() >= SOLUTION_CAP {
                    return Err(Error::capacity(format!(
                        "solution count exceeds cap {SOLUTION_CAP}"
                    )));
                }
                let mut full = Vec::with_capacity(k);
                if hash_is_left {
                    full.extend_from_slice(mate);
                    full.extend_from_slice(&tuple);
                } else {
                    full.extend_from_slice(&tuple);
                    full.extend_from_slice(mate);
                }
                out.push(full);
            }
        }
        if !advance(&mut tuple, y) {
            break;
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Odometer increment over [1, y]^len; false once exhausted.
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
