//! Scalar abstraction for the floating-point kernels.
//!
//! Everything that is plain real arithmetic (zeta evaluation, quadrature,
//! compensated sums, regression) is written against [`Real`] so the same code
//! runs at `f32` or `f64`. Concrete aliases live at the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive};

pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Sum
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Shorthand for lifting an `f64` literal into the working scalar.
#[inline]
pub fn r<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("f64 literal must convert into the scalar type")
}

/// Lift a `usize` (table index, truncation point) into the scalar.
#[inline]
pub fn ru<R: Real>(n: usize) -> R {
    R::from_usize(n).expect("usize must convert into the scalar type")
}
