//! Gauss–Legendre quadrature with nodes computed by Newton iteration on the
//! Legendre recurrence.

use crate::error::{Error, Result};
use crate::real::{r, Real};

#[derive(Clone, Debug)]
pub struct GaussLegendre<R: Real> {
    /// nodes on (-1, 1), ascending
    pub nodes: Vec<R>,
    pub weights: Vec<R>,
}

/// Orders the moment integrator accepts.
pub const ALLOWED_ORDERS: [usize; 3] = [8, 16, 32];

impl<R: Real> GaussLegendre<R> {
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 || order > 128 {
            return Err(Error::Order(order));
        }
        let n = order;
        let mut nodes = vec![R::zero(); n];
        let mut weights = vec![R::zero(); n];
        // nodes and weights are resolved in f64 and lifted; plenty for f32/f64
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            nodes[n - 1 - i] = r(x);
            weights[n - 1 - i] = r(2.0 / ((1.0 - x * x) * dp * dp));
        }
        Ok(GaussLegendre { nodes, weights })
    }

    /// Integral of f over [a, b].
    pub fn integrate<F: Fn(R) -> R>(&self, a: R, b: R, f: F) -> R {
        let half = (b - a) / r(2.0);
        let mid = (a + b) / r(2.0);
        let mut total = R::zero();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            total += w * f(mid + half * x);
        }
        total * half
    }
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0f64;
    let mut p1 = x;
    for j in 2..=n {
        let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}
