//! Numerics for the error term Delta_a(x) of the summatory divisor function
//! sigma_a with -1/2 < a < 0: zeta constants, sieved sigma tables, exact
//! square-root relation machinery, the balance series behind the moment
//! constants, closed-form exponents, truncated oscillating-series
//! approximation, and window moment integrals.
//!
//! Numeric kernels are generic over the scalar through [`real::Real`]
//! (f64 or f32); the exact integer layers (relations, cache format) and the
//! series pipeline are f64. Concrete f64 aliases live at the crate root.

pub mod error;
pub mod exponents;
pub mod fit;
pub mod moments;
pub mod quad;
pub mod real;
pub mod relations;
pub mod series;
pub mod sigma;
pub mod sum;
pub mod voronoi;
pub mod zeta;

pub use error::{Error, Result};
pub use real::Real;

/// f64 aliases for the generic building blocks.
pub type SigmaTable = sigma::SigmaTable<f64>;
pub type DeltaEvaluator<'a> = sigma::DeltaEvaluator<'a, f64>;
pub type ZetaConstants = zeta::ZetaConstants<f64>;
pub type ExponentBundle = exponents::ExponentBundle<f64>;
pub type FitResult = fit::FitResult<f64>;
pub type GaussLegendre = quad::GaussLegendre<f64>;

pub use exponents::{auto_cutoff, corollary_delta, corollary_range, exponent_bundle, Branch};
pub use fit::{fit_line, fit_loglog, loglog_slope};
pub use moments::{
    fit_exponent, integrate_delta_power, moment_report, MomentRecord, Window,
};
pub use relations::{
    count_near_solutions, enumerate_solutions, kernel_decompose, min_nonzero_gap,
    sqrt_sum_is_zero, KernelForm, RelationTuple, SignPattern,
};
pub use series::{b_k_finite, c_k, s_kl, CkConvention, SeriesEstimate};
pub use sigma::{build_sigma_table, sigma_direct};
pub use voronoi::{PhaseMode, VoronoiSeries};
pub use zeta::{zeta_constants, zeta_real};
