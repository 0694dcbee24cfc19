//! Main sequences: van der Corput, rank-1 lattice and Owen-scrambled Sobol.
//!
//! All sequences are evaluated in 32-bit fixed point. A point with mantissa
//! `n` corresponds to the real value `n / 2^32`, so modular arithmetic on
//! the torus is plain wrapping integer arithmetic.

use crate::error::{Error, Result};
use crate::hash::{hash_u32, hash_words, split};
use crate::scalar::Real;

use super::Point2;

/// Base-2 radical inverse of `k` as a fixed-point mantissa.
#[inline]
pub fn radical_inverse_bits(k: u32) -> u32 {
    k.reverse_bits()
}

/// Base-2 van der Corput sequence: the bits of `k` mirrored across the
/// binary point.
#[inline]
pub fn van_der_corput<T: Real>(k: u32) -> T {
    T::from_unit_bits(radical_inverse_bits(k))
}

/// Integer generating vector of a rank-1 lattice.
///
/// The lattice point for index `k` is `mod(Φ(k) · (x, y), 1)`. Because
/// `Φ(k)` has at most 32 fractional bits, the product modulo one is exact in
/// wrapping `u32` arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorVector {
    x: u32,
    y: u32,
}

impl GeneratorVector {
    /// Default second component. Chosen by exhaustive search over odd
    /// multipliers below 2^20 for the largest worst-case normalized minimum
    /// toroidal distance across all prefixes of `2^m` points, `3 <= m <= 20`
    /// (the worst case is `0.759 / sqrt(n)`).
    pub const DEFAULT_MULTIPLIER: u32 = 17_939;

    pub fn new(x: u32, y: u32) -> Result<Self> {
        if x == 0 || y == 0 {
            return Err(Error::InvalidConfig(format!(
                "generator components must be nonzero, got ({x}, {y})"
            )));
        }
        if y % 2 == 0 {
            return Err(Error::InvalidConfig(format!(
                "generator second component must be odd, got {y}"
            )));
        }
        Ok(Self { x, y })
    }

    /// The Korobov-form generator `(1, a)`.
    pub fn korobov(a: u32) -> Result<Self> {
        Self::new(1, a)
    }

    pub fn components(self) -> (u32, u32) {
        (self.x, self.y)
    }
}

impl Default for GeneratorVector {
    fn default() -> Self {
        Self {
            x: 1,
            y: Self::DEFAULT_MULTIPLIER,
        }
    }
}

/// Fixed-point rank-1 lattice point.
#[inline]
pub fn rank1_bits(k: u32, d: GeneratorVector) -> (u32, u32) {
    let phi = radical_inverse_bits(k);
    (phi.wrapping_mul(d.x), phi.wrapping_mul(d.y))
}

/// Rank-1 lattice point `mod(Φ(k) · d, 1)`.
#[inline]
pub fn rank1_point<T: Real>(k: u32, d: GeneratorVector) -> Point2<T> {
    let (u, v) = rank1_bits(k, d);
    Point2::from_bits(u, v)
}

/// Nested-uniform scramble of a bit-reversed integer.
///
/// Every step only propagates information from lower to higher bits of
/// `n_rev`, i.e. from more significant to less significant digits of the
/// un-reversed value. That is exactly the dependency structure of an Owen
/// scramble, so elementary intervals are preserved. `scramble` should
/// already be well mixed.
#[inline]
pub fn owen_scramble_rev(mut n_rev: u32, scramble: u32) -> u32 {
    n_rev ^= n_rev.wrapping_mul(0x3d20_adea);
    n_rev = n_rev.wrapping_add(scramble);
    n_rev = n_rev.wrapping_mul((scramble >> 16) | 1);
    n_rev ^= n_rev.wrapping_mul(0x0552_6c56);
    n_rev ^= n_rev.wrapping_mul(0x53a2_2864);
    n_rev
}

/// Owen scramble of a fixed-point mantissa.
#[inline]
pub fn owen_scramble(bits: u32, scramble: u32) -> u32 {
    owen_scramble_rev(bits.reverse_bits(), scramble).reverse_bits()
}

/// Permutes sample indices so that every aligned block of `2^m` indices
/// maps onto an aligned block of `2^m` indices.
///
/// Used to decorrelate padded dimension pairs while keeping each power-of-two
/// prefix a complete (shifted) point set.
#[inline]
pub fn shuffle_index(k: u32, scramble: u32) -> u32 {
    owen_scramble_rev(k.reverse_bits(), scramble).reverse_bits()
}

// Direction numbers of the second Sobol dimension (primitive polynomial
// x + 1): v_0 = 1/2, v_i = v_{i-1} xor (v_{i-1} >> 1).
const fn sobol_dim1_directions() -> [u32; 32] {
    let mut v = [0u32; 32];
    v[0] = 1 << 31;
    let mut i = 1;
    while i < 32 {
        v[i] = v[i - 1] ^ (v[i - 1] >> 1);
        i += 1;
    }
    v
}

const SOBOL_DIM1: [u32; 32] = sobol_dim1_directions();

/// First two Sobol dimensions, in Gray-code order, as fixed-point mantissas.
#[inline]
pub fn sobol_bits(k: u32) -> (u32, u32) {
    let gray = k ^ (k >> 1);
    let x = gray.reverse_bits();
    let mut y = 0u32;
    let mut bits = gray;
    while bits != 0 {
        let i = bits.trailing_zeros();
        y ^= SOBOL_DIM1[i as usize];
        bits &= bits - 1;
    }
    (x, y)
}

/// Unscrambled 2D Sobol point.
#[inline]
pub fn sobol_point<T: Real>(k: u32) -> Point2<T> {
    let (u, v) = sobol_bits(k);
    Point2::from_bits(u, v)
}

/// Per-dimension Owen scramble keys derived from a 64-bit seed.
#[inline]
pub fn owen_keys(seed: u64) -> (u32, u32) {
    let (a, b) = split(hash_words(seed, &[0x536f_626f_6c]));
    (hash_u32(a), hash_u32(b ^ 0x9c8f_2d3b))
}

/// Owen-scrambled 2D Sobol point keyed by `seed`.
#[inline]
pub fn sobol_owen_bits(k: u32, seed: u64) -> (u32, u32) {
    let (x, y) = sobol_bits(k);
    let (kx, ky) = owen_keys(seed);
    (owen_scramble(x, kx), owen_scramble(y, ky))
}

#[inline]
pub fn sobol_owen_point<T: Real>(k: u32, seed: u64) -> Point2<T> {
    let (u, v) = sobol_owen_bits(k, seed);
    Point2::from_bits(u, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn van_der_corput_small_indices() {
        let expected = [0.0, 0.5, 0.25, 0.75, 0.125, 0.625, 0.375, 0.875];
        for (k, &e) in expected.iter().enumerate() {
            assert_eq!(van_der_corput::<f64>(k as u32), e);
            assert_eq!(van_der_corput::<f32>(k as u32), e as f32);
        }
    }

    #[test]
    fn van_der_corput_top_index_below_one() {
        assert!(van_der_corput::<f32>(u32::MAX) < 1.0);
        assert!(van_der_corput::<f64>(u32::MAX) < 1.0);
    }

    #[test]
    fn rank1_hand_values() {
        let d = GeneratorVector::korobov(3).unwrap();
        assert_eq!(rank1_point::<f64>(0, d), Point2 { u: 0.0, v: 0.0 });
        assert_eq!(rank1_point::<f64>(1, d), Point2 { u: 0.5, v: 0.5 });
        assert_eq!(rank1_point::<f64>(2, d), Point2 { u: 0.25, v: 0.75 });
        assert_eq!(
            rank1_point::<f64>(0, GeneratorVector::default()),
            Point2 { u: 0.0, v: 0.0 }
        );
    }

    /// Independent oracle: floating-point evaluation of `Φ(k) · a mod 1`.
    #[test]
    fn rank1_matches_float_product() {
        let a = GeneratorVector::DEFAULT_MULTIPLIER;
        let d = GeneratorVector::default();
        for k in 0..4096u32 {
            let mut phi = 0.0f64;
            let mut base = 0.5;
            let mut n = k;
            while n > 0 {
                if n & 1 == 1 {
                    phi += base;
                }
                base *= 0.5;
                n >>= 1;
            }
            let v = (phi * f64::from(a)).fract();
            let p = rank1_point::<f64>(k, d);
            assert_eq!(p.u, phi);
            assert!((p.v - v).abs() < 1e-9, "k={k}");
        }
    }

    #[test]
    fn generator_validation() {
        assert!(GeneratorVector::new(0, 3).is_err());
        assert!(GeneratorVector::new(1, 4).is_err());
        assert!(GeneratorVector::new(1, 5).is_ok());
    }

    /// Oracle: Sobol by the textbook recurrence on Gray code, with direction
    /// numbers m_i written out by hand (1, 3, 5, 15, 17, 51, ...).
    #[test]
    fn sobol_first_points() {
        let pts: Vec<Point2<f64>> = (0..4).map(sobol_point).collect();
        let expected = [(0.0, 0.0), (0.5, 0.5), (0.75, 0.25), (0.25, 0.75)];
        for (p, e) in pts.iter().zip(expected) {
            assert_eq!((p.u, p.v), e);
        }
        let m = [1u32, 3, 5, 15, 17, 51, 85, 255];
        for (i, &mi) in m.iter().enumerate() {
            assert_eq!(SOBOL_DIM1[i], mi << (31 - i));
        }
    }

    #[test]
    fn owen_scramble_is_bijective_on_low_bits() {
        // On the top 8 bits, scrambling must permute the 256 strata.
        let mut seen = [false; 256];
        for i in 0..256u32 {
            let s = owen_scramble(i << 24, 0x1234_5678) >> 24;
            assert!(!seen[s as usize]);
            seen[s as usize] = true;
        }
    }

    #[test]
    fn shuffle_preserves_blocks() {
        for m in 0..6 {
            let n = 1u32 << m;
            for block in 0..4u32 {
                let mapped: Vec<u32> = (0..n)
                    .map(|i| shuffle_index(block * n + i, 0xabcd_ef01))
                    .collect();
                let target = mapped[0] >> m;
                assert!(mapped.iter().all(|&x| x >> m == target));
                let mut lows: Vec<u32> = mapped.iter().map(|&x| x & (n - 1)).collect();
                lows.sort_unstable();
                assert_eq!(lows, (0..n).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn owen_sobol_differs_between_seeds() {
        let a: Vec<(u32, u32)> = (0..16).map(|k| sobol_owen_bits(k, 1)).collect();
        let b: Vec<(u32, u32)> = (0..16).map(|k| sobol_owen_bits(k, 2)).collect();
        assert_ne!(a, b);
    }
}
