//! Gaussian-weighted pairwise loss over the tile and its incremental form.
//!
//! ```text
//! L = Σ_p Σ_{q≠p} exp(-|p - q|² / D) · |I_p - I_q|²
//! ```
//!
//! with `D = kernel_width²` by default. Both orders of every pair are
//! counted. Pixel distances are toroidal unless disabled, and the sum is
//! truncated to `|p - q| <= truncation_radius`.
//!
//! Lowering `L` makes neighboring estimates alike, which clusters the error
//! at low frequencies. On a torus `L = C - 2 Σ w (I_p - Ī)·(I_q - Ī)` with
//! `C` fixed by the multiset of estimates, so blue noise comes from raising
//! `L`. [`Objective`] picks the direction the optimizers push.
//!
//! The repulsive objective is `C - L` with `C = 2 W Σ_p |I_p - Ī|²` and `W`
//! the total neighbor weight of one pixel. `C` does not change under swaps,
//! and on a torus `C - L` is twice the weighted covariance of neighboring
//! estimates: near zero for a random tile, negative once it is blue.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sampler::ScrambleTile;
use crate::scalar::{lit, Real};

use super::EstimateCache;

/// The largest Gaussian weight that truncation may drop.
pub const DROPPED_WEIGHT: f64 = 1e-6;

/// How the kernel width enters the exponent's denominator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KernelConvention {
    /// `exp(-d² / w²)`.
    #[default]
    WidthSquared,
    /// `exp(-d² / (2 w²))`, the textbook Gaussian.
    TwiceWidthSquared,
}

/// Which direction of `L` the optimizers pursue.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Objective {
    /// Minimize `C - L`: neighbors are pushed apart and the error turns blue.
    #[default]
    Repulsive,
    /// Minimize `L` itself: neighbors are pulled together.
    Attractive,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Objective::Repulsive => "repulsive",
            Objective::Attractive => "attractive",
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "repulsive" => Ok(Objective::Repulsive),
            "attractive" => Ok(Objective::Attractive),
            other => Err(Error::InvalidConfig(format!("unknown objective `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossParams<T> {
    pub kernel_width: T,
    pub convention: KernelConvention,
    pub truncation_radius: u32,
    pub toroidal: bool,
    pub objective: Objective,
}

impl<T: Real> Default for LossParams<T> {
    fn default() -> Self {
        Self::with_width(lit(2.1))
    }
}

impl<T: Real> LossParams<T> {
    /// Parameters for `kernel_width` with the smallest truncation radius whose
    /// dropped weights are all below [`DROPPED_WEIGHT`].
    pub fn with_width(kernel_width: T) -> Self {
        let mut params = Self {
            kernel_width,
            convention: KernelConvention::WidthSquared,
            truncation_radius: 0,
            toroidal: true,
            objective: Objective::default(),
        };
        params.truncation_radius = params.minimal_radius();
        params
    }

    pub fn denominator(&self) -> T {
        let w2 = self.kernel_width * self.kernel_width;
        match self.convention {
            KernelConvention::WidthSquared => w2,
            KernelConvention::TwiceWidthSquared => w2 + w2,
        }
    }

    #[inline]
    pub fn weight(&self, dist2: T) -> T {
        (-dist2 / self.denominator()).exp()
    }

    /// Smallest integer `R` with `exp(-R² / D) < DROPPED_WEIGHT`.
    pub fn minimal_radius(&self) -> u32 {
        let d = self.denominator().to_f64().unwrap_or(f64::INFINITY);
        let r2 = d * (1.0 / DROPPED_WEIGHT).ln();
        let mut r = r2.sqrt().floor() as u32;
        while f64::from(r * r) <= r2 {
            r += 1;
        }
        r
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kernel_width > T::zero()) || !self.kernel_width.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "kernel width must be positive, got {}",
                self.kernel_width
            )));
        }
        let r = f64::from(self.truncation_radius);
        let dropped = (-(r * r) / self.denominator().to_f64().unwrap()).exp();
        if dropped >= DROPPED_WEIGHT {
            return Err(Error::InvalidConfig(format!(
                "truncation radius {} drops Gaussian weight {dropped:.3e}",
                self.truncation_radius
            )));
        }
        Ok(())
    }
}

/// Precomputed neighborhood of the loss for one tile size.
///
/// Offsets are unique representatives modulo the tile in toroidal mode,
/// so each unordered pixel pair is reached exactly once from each side even
/// when the truncation radius exceeds half the tile.
#[derive(Clone, Debug)]
pub struct LossModel<T> {
    width: usize,
    height: usize,
    toroidal: bool,
    sign: T,
    offsets: Vec<(i32, i32, T)>,
}

fn representatives(extent: usize, radius: i64, toroidal: bool) -> Vec<i64> {
    if toroidal {
        let half = (extent / 2) as i64;
        let lo = if extent == 1 { 0 } else { -half + 1 };
        (lo..=half).filter(|d| d.abs() <= radius).collect()
    } else {
        let max = (extent as i64 - 1).min(radius);
        (-max..=max).collect()
    }
}

impl<T: Real> LossModel<T> {
    pub fn new(width: usize, height: usize, params: &LossParams<T>) -> Result<Self> {
        params.validate()?;
        crate::sampler::check_pow2("tile width", width)?;
        crate::sampler::check_pow2("tile height", height)?;
        let r = i64::from(params.truncation_radius);
        let mut offsets = Vec::new();
        for dy in representatives(height, r, params.toroidal) {
            for dx in representatives(width, r, params.toroidal) {
                let d2 = dx * dx + dy * dy;
                if d2 == 0 || d2 > r * r {
                    continue;
                }
                offsets.push((dx as i32, dy as i32, params.weight(lit(d2 as f64))));
            }
        }
        Ok(Self {
            width,
            height,
            toroidal: params.toroidal,
            sign: match params.objective {
                Objective::Repulsive => -T::one(),
                Objective::Attractive => T::one(),
            },
            offsets,
        })
    }

    pub fn for_tile(tile: &ScrambleTile<T>, params: &LossParams<T>) -> Result<Self> {
        Self::new(tile.width(), tile.height(), params)
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn neighbor_count(&self) -> usize {
        self.offsets.len()
    }

    /// Calls `f(q, weight)` for every neighbor `q` of pixel `p`.
    #[inline]
    fn for_each_neighbor(&self, p: usize, mut f: impl FnMut(usize, T)) {
        let x = (p % self.width) as i64;
        let y = (p / self.width) as i64;
        let (w, h) = (self.width as i64, self.height as i64);
        for &(dx, dy, weight) in &self.offsets {
            let (mut qx, mut qy) = (x + i64::from(dx), y + i64::from(dy));
            if self.toroidal {
                qx &= w - 1;
                qy &= h - 1;
            } else if qx < 0 || qy < 0 || qx >= w || qy >= h {
                continue;
            }
            f((qy * w + qx) as usize, weight);
        }
    }

    fn check(&self, cache: &EstimateCache<T>) -> Result<()> {
        if cache.pixel_count() != self.pixel_count() {
            return Err(Error::DimensionMismatch(format!(
                "cache holds {} pixels, tile has {}",
                cache.pixel_count(),
                self.pixel_count()
            )));
        }
        Ok(())
    }

    /// Contribution of pixel `p` to the full loss.
    fn pixel_term(&self, cache: &EstimateCache<T>, p: usize) -> T {
        let ip = cache.vector(p);
        let mut acc = T::zero();
        self.for_each_neighbor(p, |q, w| acc = acc + w * dist2(ip, cache.vector(q)));
        acc
    }

    /// Full loss. The reduction order is fixed, so the result does not
    /// depend on the thread count.
    pub fn loss(&self, cache: &EstimateCache<T>) -> Result<T> {
        self.check(cache)?;
        let terms: Vec<T> = (0..self.pixel_count())
            .into_par_iter()
            .map(|p| self.pixel_term(cache, p))
            .collect();
        Ok(terms.into_iter().sum())
    }

    /// Loss change from swapping the contents of `p` and `q`, without
    /// validation.
    #[inline]
    pub(crate) fn delta_unchecked(&self, cache: &EstimateCache<T>, p: usize, q: usize) -> T {
        let ip = cache.vector(p);
        let iq = cache.vector(q);
        // |I_q - I_b|² - |I_p - I_b|² = (|I_q|² - |I_p|²) - 2 I_b·(I_q - I_p)
        let norm_change = norm2(iq) - norm2(ip);
        let two = lit::<T>(2.0);
        let mut acc = T::zero();
        self.for_each_neighbor(p, |b, w| {
            if b != q {
                acc = acc + w * (norm_change - two * dot_diff(cache.vector(b), iq, ip));
            }
        });
        self.for_each_neighbor(q, |b, w| {
            if b != p {
                acc = acc - w * (norm_change - two * dot_diff(cache.vector(b), iq, ip));
            }
        });
        two * acc
    }

    /// The value the optimizers minimize: `L` or `C - L`.
    pub fn objective(&self, cache: &EstimateCache<T>) -> Result<T> {
        let loss = self.loss(cache)?;
        if self.sign > T::zero() {
            return Ok(loss);
        }
        Ok(self.spread_constant(cache) - loss)
    }

    /// `C = 2 W Σ_p |I_p - Ī|²`, invariant under any permutation of pixels.
    pub fn spread_constant(&self, cache: &EstimateCache<T>) -> T {
        let n = cache.pixel_count();
        let m = cache.integrand_count();
        let mut mean = vec![T::zero(); m];
        for p in 0..n {
            for (a, &v) in mean.iter_mut().zip(cache.vector(p)) {
                *a = *a + v;
            }
        }
        let scale = crate::scalar::count::<T>(n);
        for a in &mut mean {
            *a = *a / scale;
        }
        let spread: T = (0..n).map(|p| dist2(cache.vector(p), &mean)).sum();
        let total_weight: T = self.offsets.iter().map(|o| o.2).sum();
        lit::<T>(2.0) * total_weight * spread
    }

    #[inline]
    pub(crate) fn objective_delta_unchecked(
        &self,
        cache: &EstimateCache<T>,
        p: usize,
        q: usize,
    ) -> T {
        self.sign * self.delta_unchecked(cache, p, q)
    }

    pub fn objective_delta(&self, cache: &EstimateCache<T>, p: usize, q: usize) -> Result<T> {
        Ok(self.sign * self.delta(cache, p, q)?)
    }

    pub fn delta(&self, cache: &EstimateCache<T>, p: usize, q: usize) -> Result<T> {
        self.check(cache)?;
        let n = self.pixel_count();
        for index in [p, q] {
            if index >= n {
                return Err(Error::PixelOutOfRange {
                    index,
                    pixel_count: n,
                });
            }
        }
        if p == q {
            return Err(Error::SamePixel(p));
        }
        Ok(self.delta_unchecked(cache, p, q))
    }
}

#[inline]
fn dist2<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| {
        let d = x - y;
        acc + d * d
    })
}

#[inline]
fn norm2<T: Real>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |acc, &x| acc + x * x)
}

/// `b · (x - y)`.
#[inline]
fn dot_diff<T: Real>(b: &[T], x: &[T], y: &[T]) -> T {
    b.iter()
        .zip(x.iter().zip(y))
        .fold(T::zero(), |acc, (&b, (&x, &y))| acc + b * (x - y))
}

fn check_tile<T: Real>(tile: &ScrambleTile<T>, cache: &EstimateCache<T>) -> Result<()> {
    if tile.pixel_count() != cache.pixel_count() {
        return Err(Error::DimensionMismatch(format!(
            "cache holds {} pixels, tile has {}",
            cache.pixel_count(),
            tile.pixel_count()
        )));
    }
    Ok(())
}

/// Full loss of a tile given its estimate cache.
pub fn loss_full<T: Real>(
    tile: &ScrambleTile<T>,
    cache: &EstimateCache<T>,
    params: &LossParams<T>,
) -> Result<T> {
    check_tile(tile, cache)?;
    LossModel::for_tile(tile, params)?.loss(cache)
}

/// `loss_after - loss_before` for swapping the contents of `p` and `q`.
pub fn loss_delta_swap<T: Real>(
    tile: &ScrambleTile<T>,
    cache: &EstimateCache<T>,
    params: &LossParams<T>,
    p: usize,
    q: usize,
) -> Result<T> {
    check_tile(tile, cache)?;
    LossModel::for_tile(tile, params)?.delta(cache, p, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_radius_is_eight() {
        let params = LossParams::<f64>::default();
        assert_eq!(params.truncation_radius, 8);
        assert!(params.validate().is_ok());
        let mut short = params;
        short.truncation_radius = 7;
        assert!(short.validate().is_err());
    }

    #[test]
    fn two_pixel_hand_value() {
        let cache = EstimateCache::from_vectors(1, vec![0.5, 0.25]).unwrap();
        let mut params = LossParams::<f64>::default();
        params.toroidal = false;
        let model = LossModel::new(2, 1, &params).unwrap();
        let expected = 2.0 * (-1.0f64 / 4.41).exp() * 0.0625;
        let got = model.loss(&cache).unwrap();
        assert!((got - expected).abs() < 1e-15);
        assert!((got - 0.099_639_27).abs() < 1e-8);
        // On a torus of width 2 the single neighbor is still counted once.
        params.toroidal = true;
        let model = LossModel::new(2, 1, &params).unwrap();
        assert!((model.loss(&cache).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn small_torus_counts_each_pair_once() {
        let params = LossParams::<f64>::default();
        let model = LossModel::new(4, 4, &params).unwrap();
        assert_eq!(model.neighbor_count(), 15);
        let model = LossModel::new(32, 32, &params).unwrap();
        // Lattice points in a disk of radius 8, minus the origin.
        assert_eq!(model.neighbor_count(), 196);
    }

    #[test]
    fn delta_rejects_same_pixel() {
        let cache = EstimateCache::from_vectors(1, vec![0.0; 4]).unwrap();
        let model = LossModel::new(2, 2, &LossParams::<f64>::default()).unwrap();
        assert!(matches!(
            model.delta(&cache, 1, 1),
            Err(Error::SamePixel(1))
        ));
        assert!(matches!(
            model.delta(&cache, 1, 9),
            Err(Error::PixelOutOfRange { .. })
        ));
    }

    #[test]
    fn twice_width_convention() {
        let mut params = LossParams::<f64>::with_width(2.1);
        params.convention = KernelConvention::TwiceWidthSquared;
        params.truncation_radius = params.minimal_radius();
        assert!(params.truncation_radius > 8);
        assert!((params.weight(1.0) - (-1.0 / 8.82f64).exp()).abs() < 1e-15);
    }

    fn noisy_cache(n: usize, m: usize) -> EstimateCache<f64> {
        let values = (0..n * m)
            .map(|i| (crate::hash::hash_words(9, &[i as u64]) >> 11) as f64 / (1u64 << 53) as f64)
            .collect();
        EstimateCache::from_vectors(m, values).unwrap()
    }

    #[test]
    fn torus_loss_is_constant_minus_covariance() {
        let (w, h, m) = (8, 4, 3);
        let cache = noisy_cache(w * h, m);
        let params = LossParams::<f64>::default();
        let model = LossModel::new(w, h, &params).unwrap();
        let n = w * h;
        let mean: Vec<f64> = (0..m)
            .map(|j| (0..n).map(|p| cache.vector(p)[j]).sum::<f64>() / n as f64)
            .collect();
        let c = |p: usize| -> Vec<f64> {
            cache
                .vector(p)
                .iter()
                .zip(&mean)
                .map(|(a, b)| a - b)
                .collect()
        };
        let total_weight: f64 = model.offsets.iter().map(|o| o.2).sum();
        let spread: f64 = (0..n).map(|p| norm2(&c(p))).sum();
        let mut cov = 0.0;
        for p in 0..n {
            model.for_each_neighbor(p, |q, wt| {
                cov += wt * c(p).iter().zip(c(q)).map(|(a, b)| a * b).sum::<f64>()
            });
        }
        let loss = model.loss(&cache).unwrap();
        let identity = 2.0 * total_weight * spread - 2.0 * cov;
        assert!((loss - identity).abs() <= 1e-10 * loss);
        let objective = model.objective(&cache).unwrap();
        assert!((objective - 2.0 * cov).abs() <= 1e-10 * loss);
    }

    #[test]
    fn objective_sign() {
        let cache = noisy_cache(16, 2);
        let mut params = LossParams::<f64>::default();
        let repel = LossModel::new(4, 4, &params).unwrap();
        params.objective = Objective::Attractive;
        let attract = LossModel::new(4, 4, &params).unwrap();
        let l = attract.loss(&cache).unwrap();
        assert_eq!(attract.objective(&cache).unwrap(), l);
        assert_eq!(
            repel.objective(&cache).unwrap(),
            repel.spread_constant(&cache) - l
        );
        let d = attract.delta(&cache, 2, 9).unwrap();
        assert_eq!(repel.objective_delta(&cache, 2, 9).unwrap(), -d);
        assert_eq!(
            "repulsive".parse::<Objective>().unwrap(),
            Objective::Repulsive
        );
        assert!("down".parse::<Objective>().is_err());
    }
}
