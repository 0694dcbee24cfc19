//! Sampler configuration and the padded per-pixel sampling interface.
//!
//! Samples are consumed in 2D pairs. Pair 0 is the tile-scrambled main
//! sequence itself. Pair `j > 0` reuses the same main sequence with its
//! sample indices shuffled block-wise and an extra constant shift, both
//! hashed from `(seed, j)`, and is then scrambled by the *same* tile shift,
//! so neighboring pixels stay aligned dimension by dimension. A renderer
//! that needs an odd number of dimensions takes a full pair and drops one
//! component.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hash::{hash_u32, hash_words, split};
use crate::scalar::Real;

use super::scramble::{shift_scramble, xor_scramble};
use super::sequence::{rank1_point, shuffle_index, sobol_owen_point, GeneratorVector};
use super::{Point2, ScrambleTile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SamplerKind {
    /// Rank-1 lattice, scrambled per pixel by a toroidal shift.
    Rank1,
    /// Owen-scrambled Sobol, scrambled per pixel by XOR.
    SobolOwenXor,
    /// Hash-based i.i.d. uniform samples; ignores the tile.
    WhiteNoise,
}

impl SamplerKind {
    pub fn name(self) -> &'static str {
        match self {
            SamplerKind::Rank1 => "rank1",
            SamplerKind::SobolOwenXor => "sobol-xor",
            SamplerKind::WhiteNoise => "white-noise",
        }
    }

    /// Whether per-pixel samples depend on the pixel only through its
    /// tile shift.
    pub fn uses_tile(self) -> bool {
        !matches!(self, SamplerKind::WhiteNoise)
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rank1" => Ok(SamplerKind::Rank1),
            "sobol-xor" | "sobol-owen-xor" => Ok(SamplerKind::SobolOwenXor),
            "white-noise" | "white" => Ok(SamplerKind::WhiteNoise),
            other => Err(Error::InvalidConfig(format!(
                "unknown sampler kind `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplerSpec {
    pub kind: SamplerKind,
    pub generator: GeneratorVector,
    pub spp: u32,
    pub seed: u64,
    pub pair_count: usize,
}

impl SamplerSpec {
    pub fn new(kind: SamplerKind, spp: u32, seed: u64) -> Self {
        Self {
            kind,
            generator: GeneratorVector::default(),
            spp,
            seed,
            pair_count: 1,
        }
    }

    pub fn rank1(spp: u32) -> Self {
        Self::new(SamplerKind::Rank1, spp, 0)
    }

    pub fn with_pairs(mut self, pair_count: usize) -> Self {
        self.pair_count = pair_count;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_generator(mut self, generator: GeneratorVector) -> Self {
        self.generator = generator;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.spp == 0 {
            return Err(Error::InvalidConfig("spp must be at least 1".into()));
        }
        if self.pair_count == 0 {
            return Err(Error::InvalidConfig("pair_count must be at least 1".into()));
        }
        Ok(())
    }

    fn check_pair(&self, pair: usize) -> Result<()> {
        if pair >= self.pair_count {
            Err(Error::PairOutOfRange {
                pair,
                pair_count: self.pair_count,
            })
        } else {
            Ok(())
        }
    }

    /// Index shuffle key and extra shift of a padded pair.
    fn pad(&self, pair: usize) -> (u32, (u32, u32)) {
        let h = hash_words(self.seed, &[0x7061_6473, pair as u64]);
        let (a, b) = split(hash_words(h, &[1]));
        (hash_u32(h as u32 ^ (h >> 32) as u32), (a, b))
    }

    /// Main-sequence point of pair `pair` before the per-pixel scramble.
    #[inline]
    fn main_point<T: Real>(&self, k: u32, pair: usize) -> Point2<T> {
        match self.kind {
            SamplerKind::Rank1 => {
                if pair == 0 {
                    rank1_point(k, self.generator)
                } else {
                    let (key, (du, dv)) = self.pad(pair);
                    let s: Point2<T> = rank1_point(shuffle_index(k, key), self.generator);
                    shift_scramble(s, Point2::from_bits(du, dv))
                }
            }
            SamplerKind::SobolOwenXor => {
                if pair == 0 {
                    sobol_owen_point(k, self.seed)
                } else {
                    let (key, _) = self.pad(pair);
                    sobol_owen_point(shuffle_index(k, key), hash_words(self.seed, &[pair as u64]))
                }
            }
            SamplerKind::WhiteNoise => unreachable!("white noise has no main sequence"),
        }
    }

    /// Sample `k` of dimension pair `pair` for the pixel whose tile shift is
    /// `shift`. Not meaningful for [`SamplerKind::WhiteNoise`].
    #[inline]
    pub fn sample_with_shift<T: Real>(&self, shift: Point2<T>, k: u32, pair: usize) -> Point2<T> {
        let s = self.main_point(k, pair);
        match self.kind {
            SamplerKind::Rank1 => shift_scramble(s, shift),
            SamplerKind::SobolOwenXor => xor_scramble(s, shift),
            SamplerKind::WhiteNoise => unreachable!("white noise has no main sequence"),
        }
    }

    #[inline]
    fn white_noise<T: Real>(&self, pixel: usize, k: u32, pair: usize) -> Point2<T> {
        let h = hash_words(
            self.seed,
            &[0x7768_6974, pixel as u64, u64::from(k), pair as u64],
        );
        let (a, b) = split(h);
        Point2::from_bits(a, b)
    }

    /// Padded sampler entry point. Pixel coordinates wrap modulo the tile.
    pub fn sample<T: Real>(
        &self,
        tile: &ScrambleTile<T>,
        pixel: (i64, i64),
        k: u32,
        pair: usize,
    ) -> Result<Point2<T>> {
        self.check_pair(pair)?;
        let index = tile.index(pixel.0, pixel.1);
        Ok(match self.kind {
            SamplerKind::WhiteNoise => self.white_noise(index, k, pair),
            _ => self.sample_with_shift(tile.shift_at(index), k, pair),
        })
    }

    /// All `spp * pairs` samples of one pixel, sample-major: sample `k` of
    /// pair `j` lands at `k * pairs + j`.
    pub fn pixel_samples<T: Real>(
        &self,
        tile: &ScrambleTile<T>,
        index: usize,
        pairs: usize,
        out: &mut Vec<Point2<T>>,
    ) -> Result<()> {
        if pairs > 0 {
            self.check_pair(pairs - 1)?;
        }
        out.clear();
        out.reserve(self.spp as usize * pairs);
        for k in 0..self.spp {
            for pair in 0..pairs {
                out.push(match self.kind {
                    SamplerKind::WhiteNoise => self.white_noise(index, k, pair),
                    _ => self.sample_with_shift(tile.shift_at(index), k, pair),
                });
            }
        }
        Ok(())
    }

    /// Like [`SamplerSpec::pixel_samples`] but driven directly by a shift
    /// value.
    pub fn shift_samples<T: Real>(
        &self,
        shift: Point2<T>,
        pairs: usize,
        out: &mut Vec<Point2<T>>,
    ) -> Result<()> {
        if !self.kind.uses_tile() {
            return Err(Error::NotOptimizable(self.kind.name()));
        }
        if pairs > 0 {
            self.check_pair(pairs - 1)?;
        }
        out.clear();
        out.reserve(self.spp as usize * pairs);
        for k in 0..self.spp {
            for pair in 0..pairs {
                out.push(self.sample_with_shift(shift, k, pair));
            }
        }
        Ok(())
    }
}
