//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating point type the cocycle machinery is generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a count into `Self`.
    #[inline]
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    /// `2π`.
    #[inline]
    fn two_pi() -> Self {
        Self::TAU()
    }

    /// Reduces a phase into `[0, 1)`.
    #[inline]
    fn frac_mod1(self) -> Self {
        let r = self - self.floor();
        // floor can round r up to exactly 1 for tiny negative inputs
        if r >= Self::one() {
            Self::zero()
        } else {
            r
        }
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Default
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// The golden mean `(√5 − 1)/2`, default frequency for all numerics.
pub fn golden_mean<T: Real>() -> T {
    (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0)
}
