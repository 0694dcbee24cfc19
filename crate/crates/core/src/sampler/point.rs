use crate::scalar::{wrap_unit, Real};

/// A point on the unit torus `[0, 1)²`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point2<T> {
    pub u: T,
    pub v: T,
}

impl<T: Real> Point2<T> {
    /// Builds a point; debug builds check the half-open unit range.
    #[inline]
    pub fn new(u: T, v: T) -> Self {
        debug_assert!(in_unit(u) && in_unit(v), "point ({u}, {v}) outside [0,1)^2");
        Self { u, v }
    }

    /// Builds a point by reducing both coordinates modulo one.
    #[inline]
    pub fn wrapped(u: T, v: T) -> Self {
        Self {
            u: wrap_unit(u),
            v: wrap_unit(v),
        }
    }

    /// Builds a point from two 32-bit fixed-point mantissas.
    #[inline]
    pub fn from_bits(u: u32, v: u32) -> Self {
        Self {
            u: T::from_unit_bits(u),
            v: T::from_unit_bits(v),
        }
    }

    #[inline]
    pub fn to_bits(self) -> (u32, u32) {
        (self.u.to_unit_bits(), self.v.to_unit_bits())
    }

    pub fn is_valid(self) -> bool {
        in_unit(self.u) && in_unit(self.v)
    }
}

#[inline]
fn in_unit<T: Real>(x: T) -> bool {
    x >= T::zero() && x < T::one()
}
