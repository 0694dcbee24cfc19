use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::integrands::{Integrand, IntegrandBank};
use crate::sampler::{SamplerSpec, ScrambleTile};
use crate::scalar::Real;

/// Per-pixel Monte-Carlo estimate vectors for the shift currently stored at
/// each pixel.
///
/// Estimates depend on a pixel only through its shift value, so a swap in the
/// tile is mirrored by swapping two rows here.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateCache<T> {
    m: usize,
    values: Vec<T>,
}

impl<T: Real> EstimateCache<T> {
    /// Computes the estimate vector of every pixel of `tile`.
    pub fn build<F: Integrand<T>>(
        spec: &SamplerSpec,
        bank: &IntegrandBank<T, F>,
        tile: &ScrambleTile<T>,
    ) -> Result<Self> {
        spec.validate()?;
        if !spec.kind.uses_tile() {
            return Err(Error::NotOptimizable(spec.kind.name()));
        }
        let m = bank.len();
        let pairs = bank.pairs();
        let mut values = vec![T::zero(); m * tile.pixel_count()];
        values
            .par_chunks_mut(m)
            .enumerate()
            .try_for_each_init(Vec::new, |samples, (p, row)| {
                spec.shift_samples(tile.shift_at(p), pairs, samples)?;
                bank.estimate_into(samples, row)
            })?;
        Ok(Self { m, values })
    }

    /// Wraps precomputed vectors laid out pixel-major.
    pub fn from_vectors(m: usize, values: Vec<T>) -> Result<Self> {
        if m == 0 || values.len() % m != 0 {
            return Err(Error::DimensionMismatch(format!(
                "{} values do not split into vectors of length {m}",
                values.len()
            )));
        }
        Ok(Self { m, values })
    }

    /// Length of each estimate vector.
    pub fn integrand_count(&self) -> usize {
        self.m
    }

    pub fn pixel_count(&self) -> usize {
        self.values.len() / self.m
    }

    #[inline]
    pub fn vector(&self, p: usize) -> &[T] {
        &self.values[p * self.m..(p + 1) * self.m]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn swap(&mut self, p: usize, q: usize) {
        if p == q {
            return;
        }
        let (lo, hi) = if p < q { (p, q) } else { (q, p) };
        let m = self.m;
        let (head, tail) = self.values.split_at_mut(hi * m);
        head[lo * m..(lo + 1) * m].swap_with_slice(&mut tail[..m]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrands::make_bank;

    #[test]
    fn swap_rows() {
        let mut cache = EstimateCache::from_vectors(2, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        cache.swap(2, 0);
        assert_eq!(cache.values(), &[5.0, 6.0, 3.0, 4.0, 1.0, 2.0]);
        cache.swap(1, 1);
        assert_eq!(cache.vector(1), &[3.0, 4.0]);
    }

    #[test]
    fn tile_swap_mirrors_cache_swap() {
        let spec = SamplerSpec::rank1(8);
        let bank = make_bank::<f64>(6, 1).unwrap();
        let mut tile = ScrambleTile::random(4, 4, 2).unwrap();
        let mut cache = EstimateCache::build(&spec, &bank, &tile).unwrap();
        tile.swap(3, 11);
        cache.swap(3, 11);
        assert_eq!(cache, EstimateCache::build(&spec, &bank, &tile).unwrap());
    }

    #[test]
    fn white_noise_is_rejected() {
        let spec = SamplerSpec::new(crate::SamplerKind::WhiteNoise, 4, 0);
        let bank = make_bank::<f64>(2, 1).unwrap();
        let tile = ScrambleTile::random(2, 2, 2).unwrap();
        assert!(matches!(
            EstimateCache::build(&spec, &bank, &tile),
            Err(Error::NotOptimizable(_))
        ));
    }
}
