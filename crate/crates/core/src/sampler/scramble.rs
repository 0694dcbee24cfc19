use crate::scalar::{wrap_unit, Real};

use super::Point2;

/// Toroidal shift (Cranley-Patterson rotation): `mod(s + u, 1)`.
#[inline]
pub fn shift_scramble<T: Real>(s: Point2<T>, u: Point2<T>) -> Point2<T> {
    Point2 {
        u: wrap_unit(s.u + u.u),
        v: wrap_unit(s.v + u.v),
    }
}

/// XOR of the 32-bit fixed-point mantissas of `s` and `u`.
#[inline]
pub fn xor_scramble<T: Real>(s: Point2<T>, u: Point2<T>) -> Point2<T> {
    let (su, sv) = s.to_bits();
    let (uu, uv) = u.to_bits();
    Point2::from_bits(su ^ uu, sv ^ uv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(u: f64, v: f64) -> Point2<f64> {
        Point2 { u, v }
    }

    #[test]
    fn shift_examples() {
        let r = shift_scramble(p(0.7, 0.2), p(0.5, 0.9));
        assert!((r.u - 0.2).abs() < 1e-12 && (r.v - 0.1).abs() < 1e-12);
        assert_eq!(shift_scramble(p(0.3, 0.6), p(0.0, 0.0)), p(0.3, 0.6));
        assert_eq!(
            shift_scramble(p(0.999, 0.999), p(0.001, 0.001)),
            p(0.0, 0.0)
        );
        let r = shift_scramble(
            Point2 {
                u: 0.999f32,
                v: 0.999,
            },
            Point2 { u: 0.001, v: 0.001 },
        );
        assert!(r.is_valid());
    }

    #[test]
    fn xor_examples() {
        assert_eq!(xor_scramble(p(0.5, 0.0), p(0.5, 0.0)), p(0.0, 0.0));
        assert_eq!(xor_scramble(p(0.625, 0.25), p(0.0, 0.0)), p(0.625, 0.25));
        assert_eq!(xor_scramble(p(0.75, 0.5), p(0.5, 0.25)), p(0.25, 0.75));
    }
}
