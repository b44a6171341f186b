//! Exact decision and enumeration machinery for signed sums of square roots
//! of integers.
//!
//! Every zero decision goes through squarefree-kernel algebra (square roots
//! of distinct squarefree integers are linearly independent over the
//! rationals); magnitudes of nonzero sums are evaluated in fixed point with
//! 80 (or more) fractional bits, never by naked `f64` comparison.

mod counting;
mod enumerate;
mod fixed;
mod gap;
mod kernel;

pub use counting::count_near_solutions;
pub use enumerate::{enumerate_solutions, sqrt_sum_is_zero, RelationTuple};
pub use fixed::{alpha_fixed, alpha_fixed_i128, alpha_to_f64, sqrt_fixed, FRAC_BITS};
pub use gap::min_nonzero_gap;
pub use kernel::{kernel_decompose, KernelForm, SignPattern};
