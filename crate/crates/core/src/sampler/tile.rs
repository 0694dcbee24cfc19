//! The scramble tile and its `BNT1` binary format.
//!
//! Layout: magic `BNT1`, then little-endian `u32` width, `u32` height,
//! `u32` reserved (zero), then `width * height` pairs of little-endian
//! `f32` `(u, v)`, row-major, top row first.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::Point2;

pub const TILE_MAGIC: &[u8; 4] = b"BNT1";
const HEADER_LEN: usize = 16;

/// A `width x height` grid of per-pixel shift vectors, repeated
/// periodically across the screen.
#[derive(Clone, Debug, PartialEq)]
pub struct ScrambleTile<T> {
    width: usize,
    height: usize,
    shifts: Vec<Point2<T>>,
}

pub(crate) fn check_pow2(what: &'static str, value: usize) -> Result<()> {
    if value.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::NotPowerOfTwo { what, value })
    }
}

impl<T: Real> ScrambleTile<T> {
    pub fn new(width: usize, height: usize, shifts: Vec<Point2<T>>) -> Result<Self> {
        check_pow2("tile width", width)?;
        check_pow2("tile height", height)?;
        if shifts.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "{} shifts for a {width}x{height} tile",
                shifts.len()
            )));
        }
        if let Some(i) = shifts.iter().position(|s| !s.is_valid()) {
            return Err(Error::InvalidConfig(format!(
                "shift {i} = ({}, {}) outside [0,1)^2",
                shifts[i].u, shifts[i].v
            )));
        }
        Ok(Self {
            width,
            height,
            shifts,
        })
    }

    /// Every pixel holds the same shift.
    pub fn constant(width: usize, height: usize, shift: Point2<T>) -> Result<Self> {
        Self::new(width, height, vec![shift; width * height])
    }

    /// Shifts drawn i.i.d. uniform on `[0,1)²` from `seed`.
    ///
    /// Values are generated as 24-bit fixed point so the tile is exactly
    /// representable in the `f32` file format.
    pub fn random(width: usize, height: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shifts = (0..width * height)
            .map(|_| {
                let u: u32 = rng.gen();
                let v: u32 = rng.gen();
                Point2::from_bits(u & 0xffff_ff00, v & 0xffff_ff00)
            })
            .collect();
        Self::new(width, height, shifts)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.shifts.len()
    }

    pub fn shifts(&self) -> &[Point2<T>] {
        &self.shifts
    }

    /// Linear index of pixel `(i, j)`, wrapping both coordinates.
    #[inline]
    pub fn index(&self, i: i64, j: i64) -> usize {
        let x = i.rem_euclid(self.width as i64) as usize;
        let y = j.rem_euclid(self.height as i64) as usize;
        y * self.width + x
    }

    /// Shift at pixel `(i, j)`; the tile repeats in both directions.
    #[inline]
    pub fn shift(&self, i: i64, j: i64) -> Point2<T> {
        self.shifts[self.index(i, j)]
    }

    #[inline]
    pub fn shift_at(&self, index: usize) -> Point2<T> {
        self.shifts[index]
    }

    #[inline]
    pub fn swap(&mut self, p: usize, q: usize) {
        self.shifts.swap(p, q);
    }

    /// Serializes to `BNT1`. Shifts are stored as `f32`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * self.shifts.len());
        out.extend_from_slice(TILE_MAGIC);
        out.extend_from_slice(&(self.width as u32).to_le_bytes());
        out.extend_from_slice(&(self.height as u32).to_le_bytes());
        out.extend_from_slice(&0u32.to_le_bytes());
        for s in &self.shifts {
            let u = s.u.to_f32().unwrap_or(0.0).min(f32::BELOW_ONE);
            let v = s.v.to_f32().unwrap_or(0.0).min(f32::BELOW_ONE);
            out.extend_from_slice(&u.to_le_bytes());
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    /// Parses `BNT1` bytes. Errors carry the byte offset of the problem.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        const FMT: &str = "BNT1";
        if bytes.len() < HEADER_LEN {
            return Err(Error::format(FMT, bytes.len(), "truncated header"));
        }
        if &bytes[..4] != TILE_MAGIC {
            return Err(Error::format(FMT, 0, "bad magic"));
        }
        let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap());
        let width = word(4) as usize;
        let height = word(8) as usize;
        if !width.is_power_of_two() {
            return Err(Error::format(
                FMT,
                4,
                format!("width {width} is not a power of two"),
            ));
        }
        if !height.is_power_of_two() {
            return Err(Error::format(
                FMT,
                8,
                format!("height {height} is not a power of two"),
            ));
        }
        if word(12) != 0 {
            return Err(Error::format(FMT, 12, "reserved field is nonzero"));
        }
        let expected = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(8))
            .and_then(|n| n.checked_add(HEADER_LEN))
            .ok_or_else(|| Error::format(FMT, 4, "tile dimensions overflow"))?;
        if bytes.len() != expected {
            return Err(Error::format(
                FMT,
                bytes.len().min(expected),
                format!("expected {expected} bytes, found {}", bytes.len()),
            ));
        }
        let mut shifts = Vec::with_capacity(width * height);
        for (n, chunk) in bytes[HEADER_LEN..].chunks_exact(8).enumerate() {
            let u = f32::from_le_bytes(chunk[..4].try_into().unwrap());
            let v = f32::from_le_bytes(chunk[4..].try_into().unwrap());
            for (c, x) in [u, v].into_iter().enumerate() {
                if !(0.0..1.0).contains(&x) {
                    return Err(Error::format(
                        FMT,
                        HEADER_LEN + 8 * n + 4 * c,
                        format!("shift component {x} outside [0,1)"),
                    ));
                }
            }
            shifts.push(Point2 {
                u: T::from_f32(u).unwrap(),
                v: T::from_f32(v).unwrap(),
            });
        }
        Ok(Self {
            width,
            height,
            shifts,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }

    /// Converts the shift values to another scalar type.
    pub fn cast<U: Real>(&self) -> ScrambleTile<U> {
        ScrambleTile {
            width: self.width,
            height: self.height,
            shifts: self
                .shifts
                .iter()
                .map(|s| Point2::wrapped(U::from(s.u).unwrap(), U::from(s.v).unwrap()))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_power_of_two() {
        assert!(matches!(
            ScrambleTile::<f64>::random(12, 16, 0),
            Err(Error::NotPowerOfTwo { .. })
        ));
    }

    #[test]
    fn wraps_pixel_coordinates() {
        let tile = ScrambleTile::<f64>::random(8, 4, 3).unwrap();
        assert_eq!(tile.shift(1, 2), tile.shift(9, 2));
        assert_eq!(tile.shift(1, 2), tile.shift(1, -2));
        assert_eq!(tile.shift(-1, 0), tile.shift(7, 0));
    }

    #[test]
    fn bytes_round_trip() {
        let tile = ScrambleTile::<f64>::random(4, 8, 11).unwrap();
        let bytes = tile.to_bytes();
        assert_eq!(&bytes[..4], b"BNT1");
        assert_eq!(bytes.len(), 16 + 4 * 8 * 8);
        assert_eq!(ScrambleTile::<f64>::from_bytes(&bytes).unwrap(), tile);
    }

    #[test]
    fn header_layout() {
        let tile = ScrambleTile::constant(2, 1, Point2 { u: 0.5f32, v: 0.25 }).unwrap();
        let bytes = tile.to_bytes();
        assert_eq!(
            bytes,
            [
                b'B', b'N', b'T', b'1', 2, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, //
                0, 0, 0, 0x3f, 0, 0, 0x80, 0x3e, 0, 0, 0, 0x3f, 0, 0, 0x80, 0x3e,
            ]
        );
    }

    #[test]
    fn corrupt_data_reports_offsets() {
        let tile = ScrambleTile::<f32>::random(2, 2, 1).unwrap();
        let mut bytes = tile.to_bytes();
        let err = ScrambleTile::<f32>::from_bytes(&bytes[..10]).unwrap_err();
        assert!(matches!(err, Error::Format { offset: 10, .. }));
        let err = ScrambleTile::<f32>::from_bytes(&bytes[..20]).unwrap_err();
        assert!(matches!(err, Error::Format { offset: 20, .. }));
        bytes[12] = 1;
        let err = ScrambleTile::<f32>::from_bytes(&bytes).unwrap_err();
        assert!(matches!(err, Error::Format { offset: 12, .. }));
        bytes[12] = 0;
        bytes[16 + 8 + 4..16 + 8 + 8].copy_from_slice(&1.5f32.to_le_bytes());
        let err = ScrambleTile::<f32>::from_bytes(&bytes).unwrap_err();
        assert!(matches!(err, Error::Format { offset: 28, .. }));
        bytes[0] = b'X';
        assert!(matches!(
            ScrambleTile::<f32>::from_bytes(&bytes).unwrap_err(),
            Error::Format { offset: 0, .. }
        ));
    }
}
