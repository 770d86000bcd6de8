//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point type the crate's linear algebra is generic over.
///
/// Implemented for `f32` and `f64`. Tolerances throughout the crate are
/// written as `f64` literals and mapped through [`Real::tol`], which lets a
/// lower-precision type widen them to something it can actually resolve.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Default + Sum + Send + Sync + 'static
{
    /// Maps a double-precision tolerance onto this type.
    fn tol(t: f64) -> Self;

    /// Lossless-enough conversion from an `f64` constant.
    #[inline]
    fn c(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f64 {
    #[inline]
    fn tol(t: f64) -> f64 {
        t
    }
}

impl Real for f32 {
    #[inline]
    fn tol(t: f64) -> f32 {
        // ~1000 ulp at unit scale
        t.max(1e-4) as f32
    }
}
