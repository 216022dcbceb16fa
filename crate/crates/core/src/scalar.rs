//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar type the laboratory computes in.
///
/// Implemented for `f32` and `f64`. Everything numeric in the crate is
/// generic over this trait; the concrete aliases at the crate root pin it to
/// `f64`, which is what the CLI and the snapshot format use.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    fn lit(x: f64) -> Self;

    /// Converts a count into the scalar type.
    fn from_count(n: usize) -> Self {
        Self::lit(n as f64)
    }

    fn as_f64(self) -> f64;

    /// Machine epsilon scaled for index-space tolerances.
    fn index_tol() -> Self;
}

impl Real for f64 {
    #[inline]
    fn lit(x: f64) -> Self {
        x
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
    #[inline]
    fn index_tol() -> Self {
        1e-9
    }
}

impl Real for f32 {
    #[inline]
    fn lit(x: f64) -> Self {
        x as f32
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
    #[inline]
    fn index_tol() -> Self {
        1e-4
    }
}

/// `max(x, 0)`.
#[inline]
pub fn pos_part<T: Real>(x: T) -> T {
    if x > T::zero() {
        x
    } else {
        T::zero()
    }
}

/// `max(-x, 0)`.
#[inline]
pub fn neg_part<T: Real>(x: T) -> T {
    pos_part(-x)
}
