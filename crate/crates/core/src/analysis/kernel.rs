//! Gaussian denoising kernels and wrap-around convolution.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

use super::ErrorImage;

/// Square kernel of extent `2 * radius + 1`, row-major, centered.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel<T> {
    radius: usize,
    weights: Vec<T>,
}

impl<T: Real> Kernel<T> {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn extent(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Weight at offset `(dx, dy)` from the center.
    pub fn at(&self, dx: i64, dy: i64) -> T {
        let r = self.radius as i64;
        let e = self.extent() as i64;
        self.weights[((dy + r) * e + dx + r) as usize]
    }
}

fn check_sigma<T: Real>(sigma: T) -> Result<()> {
    if sigma > T::zero() && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidSigma(sigma.to_f64().unwrap_or(f64::NAN)))
    }
}

fn kernel_radius<T: Real>(sigma: T) -> usize {
    (sigma * lit(4.0)).ceil().to_usize().unwrap_or(0).max(1)
}

/// Normalized 1D Gaussian over offsets `-r..=r`, `r = ceil(4σ)`.
pub fn gaussian_weights_1d<T: Real>(sigma: T) -> Result<Vec<T>> {
    check_sigma(sigma)?;
    let r = kernel_radius(sigma) as i64;
    let two_s2 = lit::<T>(2.0) * sigma * sigma;
    let raw: Vec<T> = (-r..=r)
        .map(|d| {
            let d = lit::<T>(d as f64);
            (-(d * d) / two_s2).exp()
        })
        .collect();
    let total: T = raw.iter().copied().sum();
    Ok(raw.into_iter().map(|w| w / total).collect())
}

/// Discrete 2D Gaussian with radius `ceil(4σ)` whose weights sum to one.
pub fn gaussian_kernel<T: Real>(sigma: T) -> Result<Kernel<T>> {
    check_sigma(sigma)?;
    let radius = kernel_radius(sigma);
    let r = radius as i64;
    let two_s2 = lit::<T>(2.0) * sigma * sigma;
    let mut weights = Vec::with_capacity((2 * radius + 1).pow(2));
    for dy in -r..=r {
        for dx in -r..=r {
            let d2 = lit::<T>((dx * dx + dy * dy) as f64);
            weights.push((-d2 / two_s2).exp());
        }
    }
    let total: T = weights.iter().copied().sum();
    for w in &mut weights {
        *w = *w / total;
    }
    Ok(Kernel { radius, weights })
}

/// Circular convolution of `image` with `kernel`.
pub fn convolve_toroidal<T: Real>(
    image: &ErrorImage<T>,
    kernel: &Kernel<T>,
) -> Result<ErrorImage<T>> {
    let (w, h) = (image.width, image.height);
    if kernel.extent() > w || kernel.extent() > h {
        return Err(Error::KernelTooLarge {
            extent: kernel.extent(),
            width: w,
            height: h,
        });
    }
    let r = kernel.radius as i64;
    let mut out = vec![T::zero(); w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let mut acc = T::zero();
            for dy in -r..=r {
                let sy = (y - dy).rem_euclid(h as i64) as usize;
                for dx in -r..=r {
                    let sx = (x - dx).rem_euclid(w as i64) as usize;
                    acc = acc + kernel.at(dx, dy) * image.values[sy * w + sx];
                }
            }
            out[y as usize * w + x as usize] = acc;
        }
    }
    ErrorImage::new(w, h, out)
}

/// Folds a centered 1D kernel onto a circle of `n` samples.
fn fold<T: Real>(weights: &[T], n: usize) -> Vec<T> {
    let r = (weights.len() / 2) as i64;
    let mut folded = vec![T::zero(); n];
    for (i, &w) in weights.iter().enumerate() {
        let d = (i as i64 - r).rem_euclid(n as i64) as usize;
        folded[d] = folded[d] + w;
    }
    folded
}

/// Gaussian blur of a tile-periodic image.
///
/// Separable and folded onto the torus, so any `σ` is allowed regardless of
/// the tile size. Where the kernel fits, the result equals
/// [`convolve_toroidal`] with [`gaussian_kernel`] up to rounding.
pub fn blur_periodic<T: Real>(image: &ErrorImage<T>, sigma: T) -> Result<ErrorImage<T>> {
    let g = gaussian_weights_1d(sigma)?;
    let (w, h) = (image.width, image.height);
    let gx = fold(&g, w);
    let gy = fold(&g, h);
    let taps_x: Vec<(usize, T)> = gx
        .iter()
        .copied()
        .enumerate()
        .filter(|t| t.1 != T::zero())
        .collect();
    let taps_y: Vec<(usize, T)> = gy
        .iter()
        .copied()
        .enumerate()
        .filter(|t| t.1 != T::zero())
        .collect();

    let mut rows = vec![T::zero(); w * h];
    for y in 0..h {
        let src = &image.values[y * w..(y + 1) * w];
        for x in 0..w {
            let mut acc = T::zero();
            for &(d, k) in &taps_x {
                acc = acc + k * src[(x + w - d) % w];
            }
            rows[y * w + x] = acc;
        }
    }
    let mut out = vec![T::zero(); w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = T::zero();
            for &(d, k) in &taps_y {
                acc = acc + k * rows[((y + h - d) % h) * w + x];
            }
            out[y * w + x] = acc;
        }
    }
    ErrorImage::new(w, h, out)
}
