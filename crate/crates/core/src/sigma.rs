//! Sieved table of sigma_a(n) with prefix sums, and exact evaluation of the
//! error term Delta_a(x) against the smooth main terms.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};
use crate::real::{r, ru, Real};
use crate::sum::Kahan;
use crate::zeta::{zeta_constants, ZetaConstants};

const MAX_N: usize = 1 << 30;

/// sigma_a(n) for n <= n_max, with full-weight prefix sums, for one fixed a.
#[derive(Clone, Debug)]
pub struct SigmaTable<R: Real> {
    pub a: R,
    pub n_max: usize,
    /// sigma[n-1] = sigma_a(n)
    sigma: Vec<R>,
    /// prefix[n-1] = sum_{m<=n} sigma_a(m), full weight
    prefix: Vec<R>,
    pub zc: ZetaConstants<R>,
}

impl<R: Real> SigmaTable<R> {
    #[inline]
    pub fn sigma(&self, n: usize) -> R {
        self.sigma[n - 1]
    }

    /// Full-weight summatory value sum_{m<=n} sigma_a(m).
    #[inline]
    pub fn prefix(&self, n: usize) -> R {
        self.prefix[n - 1]
    }

    pub fn sigma_slice(&self) -> &[R] {
        &self.sigma
    }

    pub fn prefix_slice(&self) -> &[R] {
        &self.prefix
    }
}

/// Harmonic sieve: for each d <= n_max add d^a to every multiple of d.
/// d^a is computed once per d; total work is O(N log N) additions.
pub fn build_sigma_table<R: Real>(a: R, n_max: usize) -> Result<SigmaTable<R>> {
    build_sigma_table_unchecked_range(a, n_max, true)
}

/// Same sieve without the a-range guard. Test code uses this with a in
/// (0, 1/2) to exercise the identity sigma_a(n) = n^a sigma_{-a}(n).
pub fn build_sigma_table_unchecked_range<R: Real>(
    a: R,
    n_max: usize,
    check_range: bool,
) -> Result<SigmaTable<R>> {
    let af = a.to_f64().unwrap_or(f64::NAN);
    if check_range && !(af > -0.5 && af < 0.0) {
        return Err(Error::domain(format!("a must lie in (-1/2, 0), got {af}")));
    }
    if n_max < 1 || n_max > MAX_N {
        return Err(Error::capacity(format!("n_max = {n_max} outside [1, 2^30]")));
    }
    let zc = if check_range {
        zeta_constants(a)?
    } else {
        // out-of-range a (test-only reflection tables): evaluate the three
        // zetas directly, no sign guarantees
        ZetaConstants {
            a,
            zeta_one_minus_a: crate::zeta::zeta_real(R::one() - a, 1e-15)?,
            zeta_one_plus_a: crate::zeta::zeta_real(R::one() + a, 1e-15)?,
            zeta_minus_a: crate::zeta::zeta_real(-a, 1e-15)?,
            precision_bits: 50,
        }
    };
    let mut sigma = vec![R::zero(); n_max];
    for d in 1..=n_max {
        let w = ru::<R>(d).powf(a);
        let mut m = d;
        while m <= n_max {
            sigma[m - 1] += w;
            m += d;
        }
    }
    let mut prefix = Vec::with_capacity(n_max);
    let mut acc = Kahan::<R>::new();
    for &s in &sigma {
        acc.add(s);
        prefix.push(acc.value());
    }
    Ok(SigmaTable {
        a,
        n_max,
        sigma,
        prefix,
        zc,
    })
}

/// Divisor enumeration by trial division up to sqrt(n); the oracle for the sieve.
pub fn sigma_direct<R: Real>(a: R, n: u64) -> R {
    assert!(n >= 1);
    let mut total = R::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            total += r::<R>(d as f64).powf(a);
            let q = n / d;
            if q != d {
                total += r::<R>(q as f64).powf(a);
            }
        }
        d += 1;
    }
    total
}

/// Evaluates Delta_a(x) from a sigma table. The sum at integer x follows the
/// half-weight convention: the term at n = x counts with weight 1/2.
#[derive(Clone, Copy, Debug)]
pub struct DeltaEvaluator<'a, R: Real> {
    pub table: &'a SigmaTable<R>,
}

impl<'a, R: Real> DeltaEvaluator<'a, R> {
    pub fn new(table: &'a SigmaTable<R>) -> Self {
        DeltaEvaluator { table }
    }

    /// Delta_a(x) for 1 <= x <= n_max.
    pub fn delta(&self, x: R) -> Result<R> {
        let xf = x.to_f64().ok_or_else(|| Error::range("x not finite"))?;
        if !(xf >= 1.0 && xf <= self.table.n_max as f64) {
            return Err(Error::range(format!(
                "x = {xf} outside [1, {}]",
                self.table.n_max
            )));
        }
        let n = xf.floor() as usize;
        let mut partial = self.table.prefix(n);
        if xf == xf.floor() {
            partial = partial - self.table.sigma(n) / r(2.0);
        }
        Ok(partial - self.smooth(x))
    }

    /// Delta on the open interval (n, n+1), where the step sum is the constant
    /// prefix(n). Quadrature uses this to keep the integrand smooth.
    #[inline]
    pub fn delta_in_cell(&self, n: usize, x: R) -> R {
        self.table.prefix(n) - self.smooth(x)
    }

    /// zeta(1-a) x + zeta(1+a)/(1+a) x^{1+a} - zeta(-a)/2
    #[inline]
    pub fn smooth(&self, x: R) -> R {
        let zc = &self.table.zc;
        let a = self.table.a;
        zc.zeta_one_minus_a * x + zc.zeta_one_plus_a / (R::one() + a) * x.powf(R::one() + a)
            - zc.zeta_minus_a / r(2.0)
    }
}

const MAGIC: &[u8; 4] = b"SGMA";
const VERSION: u32 = 1;

/// FNV-1a 64-bit over the payload bytes. Fixed checksum algorithm for the
/// cache format (version 1).
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

impl SigmaTable<f64> {
    /// Cache file layout (little-endian): magic "SGMA", version u32, a as
    /// binary64, n_max as u64, n_max sigma values, n_max prefix values, then
    /// an FNV-1a 64 checksum of everything before it. Bit-exact round-trip.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut payload = Vec::with_capacity(16 + 16 * self.n_max + 16);
        payload.extend_from_slice(MAGIC);
        payload.write_u32::<LittleEndian>(VERSION)?;
        payload.write_f64::<LittleEndian>(self.a)?;
        payload.write_u64::<LittleEndian>(self.n_max as u64)?;
        for &v in &self.sigma {
            payload.write_f64::<LittleEndian>(v)?;
        }
        for &v in &self.prefix {
            payload.write_f64::<LittleEndian>(v)?;
        }
        let checksum = fnv1a(&payload);
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(&payload)?;
        w.write_u64::<LittleEndian>(checksum)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<SigmaTable<f64>> {
        let mut bytes = Vec::new();
        BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
        if bytes.len() < 24 + 8 {
            return Err(Error::Format("file too short".into()));
        }
        let (payload, tail) = bytes.split_at(bytes.len() - 8);
        let stored = (&tail[..]).read_u64::<LittleEndian>()?;
        if &payload[0..4] != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        if fnv1a(payload) != stored {
            return Err(Error::Format("checksum mismatch".into()));
        }
        let mut cur = &payload[4..];
        let version = cur.read_u32::<LittleEndian>()?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let a = cur.read_f64::<LittleEndian>()?;
        let n_max = cur.read_u64::<LittleEndian>()? as usize;
        if cur.len() != 16 * n_max {
            return Err(Error::Format("length mismatch".into()));
        }
        let mut sigma = Vec::with_capacity(n_max);
        for _ in 0..n_max {
            sigma.push(cur.read_f64::<LittleEndian>()?);
        }
        let mut prefix = Vec::with_capacity(n_max);
        for _ in 0..n_max {
            prefix.push(cur.read_f64::<LittleEndian>()?);
        }
        let zc = zeta_constants(a)?;
        Ok(SigmaTable {
            a,
            n_max,
            sigma,
            prefix,
            zc,
        })
    }
}
