use crate::error::{Error, Result};

/// The unique decomposition n = c^2 * d with d squarefree, so that
/// sqrt(n) = c * sqrt(d) exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct KernelForm {
    pub n: u64,
    pub c: u64,
    pub d: u64,
}

/// Trial-division factorization; desk-scale n only.
pub fn kernel_decompose(n: u64) -> KernelForm {
    assert!(n >= 1);
    let mut rest = n;
    let mut c = 1u64;
    let mut d = 1u64;
    let mut p = 2u64;
    while p * p <= rest {
        if rest % p == 0 {
            let mut e = 0u32;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            c *= p.pow(e / 2);
            if e % 2 == 1 {
                d *= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        // leftover prime, exponent 1
        d *= rest;
    }
    KernelForm { n, c, d }
}

/// Sign bits (i_1, ..., i_{k-1}) attached to positions 2..k; position 1 is
/// always +. l = popcount, beta = k - 2l.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignPattern {
    pub k: usize,
    pub bits: Vec<u8>,
}

impl SignPattern {
    pub fn new(k: usize, bits: Vec<u8>) -> Result<Self> {
        if k < 2 || bits.len() != k - 1 || bits.iter().any(|&b| b > 1) {
            return Err(Error::domain(format!(
                "pattern needs k-1 bits in {{0,1}} (k = {k}, got {} bits)",
                bits.len()
            )));
        }
        Ok(SignPattern { k, bits })
    }

    /// Canonical pattern for an l-vs-(k-l) balance: first l positions +,
    /// the rest -.
    pub fn balanced(k: usize, l: usize) -> Result<Self> {
        if !(1 <= l && l < k) {
            return Err(Error::domain(format!("need 1 <= l < k, got l = {l}, k = {k}")));
        }
        let bits = (2..=k).map(|pos| u8::from(pos > l)).collect();
        Ok(SignPattern { k, bits })
    }

    pub fn l(&self) -> usize {
        self.bits.iter().map(|&b| b as usize).sum()
    }

    pub fn beta(&self) -> i64 {
        self.k as i64 - 2 * self.l() as i64
    }

    /// Signs for all k positions, +1 or -1.
    pub fn signs(&self) -> Vec<i64> {
        std::iter::once(1i64)
            .chain(self.bits.iter().map(|&b| if b == 0 { 1 } else { -1 }))
            .collect()
    }

    pub fn is_all_plus(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }
}
