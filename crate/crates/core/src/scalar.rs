//! Scalar abstraction shared by every module.
//!
//! All real-valued math in the crate is written against [`Real`], which is
//! implemented for `f32` and `f64`. Sequence generation itself runs on
//! 32-bit fixed point and only converts to the scalar type at the end, so
//! both precisions see the same lattice.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating point scalar usable throughout the crate.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + FftNum + Sum + Default + Debug + Display
{
    /// Largest value strictly below one.
    const BELOW_ONE: Self;

    /// Maps a 32-bit fixed-point mantissa to `[0, 1)`.
    ///
    /// The conversion truncates, so it never rounds up to `1.0`.
    fn from_unit_bits(bits: u32) -> Self;

    /// Inverse of [`Real::from_unit_bits`]: `floor(x * 2^32)`, saturating
    /// at the ends of the unit interval.
    fn to_unit_bits(self) -> u32;
}

impl Real for f32 {
    const BELOW_ONE: Self = 1.0 - f32::EPSILON / 2.0;

    #[inline]
    fn from_unit_bits(bits: u32) -> Self {
        // 24 significant bits fit the f32 mantissa exactly.
        (bits >> 8) as f32 * (1.0 / 16_777_216.0)
    }

    #[inline]
    fn to_unit_bits(self) -> u32 {
        (f64::from(self) * 4_294_967_296.0) as u32
    }
}

impl Real for f64 {
    const BELOW_ONE: Self = 1.0 - f64::EPSILON / 2.0;

    #[inline]
    fn from_unit_bits(bits: u32) -> Self {
        f64::from(bits) * (1.0 / 4_294_967_296.0)
    }

    #[inline]
    fn to_unit_bits(self) -> u32 {
        (self * 4_294_967_296.0) as u32
    }
}

/// Converts an `f64` literal into the scalar type.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Converts a count into the scalar type.
#[inline]
pub fn count<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

/// Reduces `x` modulo one into `[0, 1)`.
///
/// Values that would round to exactly `1.0` (tiny negative inputs) wrap to
/// zero, which is the same point on the torus.
#[inline]
pub fn wrap_unit<T: Real>(x: T) -> T {
    let r = x - x.floor();
    if r >= T::one() {
        T::zero()
    } else {
        r
    }
}
