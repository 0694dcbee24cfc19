use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::integrands::{Integrand, IntegrandBank};
use crate::sampler::{SamplerSpec, ScrambleTile};
use crate::scalar::{count, Real};

/// Row-major scalar image over the tile.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorImage<T> {
    pub width: usize,
    pub height: usize,
    pub values: Vec<T>,
}

impl<T: Real> ErrorImage<T> {
    pub fn new(width: usize, height: usize, values: Vec<T>) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {width}x{height} image",
                values.len()
            )));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn constant(width: usize, height: usize, value: T) -> Self {
        Self {
            width,
            height,
            values: vec![value; width * height],
        }
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> T {
        self.values[y * self.width + x]
    }

    pub fn mean(&self) -> T {
        self.values.iter().copied().sum::<T>() / count(self.values.len())
    }

    /// Root mean square of the values.
    pub fn rms(&self) -> T {
        let ss: T = self.values.iter().map(|&v| v * v).sum();
        (ss / count(self.values.len())).sqrt()
    }

    pub fn variance(&self) -> T {
        let mean = self.mean();
        let ss: T = self.values.iter().map(|&v| (v - mean) * (v - mean)).sum();
        ss / count(self.values.len())
    }
}

/// Pixel-major `pixel_count x M` grid of Monte-Carlo estimates.
pub fn estimate_grid<T: Real, F: Integrand<T>>(
    spec: &SamplerSpec,
    tile: &ScrambleTile<T>,
    bank: &IntegrandBank<T, F>,
) -> Result<Vec<T>> {
    spec.validate()?;
    let m = bank.len();
    let pairs = bank.pairs();
    let mut grid = vec![T::zero(); m * tile.pixel_count()];
    grid.par_chunks_mut(m)
        .enumerate()
        .try_for_each_init(Vec::new, |samples, (p, row)| {
            spec.pixel_samples(tile, p, pairs, samples)?;
            bank.estimate_into(samples, row)
        })?;
    Ok(grid)
}

/// One error image `I_N(p) - I_ref` per integrand of `bank`.
pub fn error_images<T: Real, F: Integrand<T>>(
    spec: &SamplerSpec,
    tile: &ScrambleTile<T>,
    bank: &IntegrandBank<T, F>,
) -> Result<Vec<ErrorImage<T>>> {
    let grid = estimate_grid(spec, tile, bank)?;
    let m = bank.len();
    Ok(bank
        .references()
        .iter()
        .enumerate()
        .map(|(i, &reference)| ErrorImage {
            width: tile.width(),
            height: tile.height(),
            values: grid.chunks_exact(m).map(|row| row[i] - reference).collect(),
        })
        .collect())
}
