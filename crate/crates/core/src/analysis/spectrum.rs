//! Error power spectra and their radial averages.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::scalar::{count, Real};

use super::ErrorImage;

/// Square power spectrum with DC moved to `(side / 2, side / 2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSpectrum<T> {
    pub side: usize,
    pub power: Vec<T>,
}

impl<T: Real> PowerSpectrum<T> {
    #[inline]
    pub fn at(&self, x: usize, y: usize) -> T {
        self.power[y * self.side + x]
    }

    pub fn total(&self) -> T {
        self.power.iter().copied().sum()
    }

    pub fn dc(&self) -> T {
        self.at(self.side / 2, self.side / 2)
    }

    /// As an image, for writing out.
    pub fn to_image(&self) -> ErrorImage<T> {
        ErrorImage {
            width: self.side,
            height: self.side,
            values: self.power.clone(),
        }
    }
}

fn check_square<T>(image: &ErrorImage<T>) -> Result<usize> {
    if image.width != image.height {
        return Err(Error::NotSquare {
            width: image.width,
            height: image.height,
        });
    }
    crate::sampler::check_pow2("spectrum side", image.width)?;
    Ok(image.width)
}

/// `|DFT(e - mean(e))|² / pixel_count`, DC centered.
///
/// With this normalization the spectrum sums to `pixel_count * variance`.
pub fn power_spectrum<T: Real>(error: &ErrorImage<T>) -> Result<PowerSpectrum<T>> {
    let n = check_square(error)?;
    let mean = error.mean();
    let mut data: Vec<Complex<T>> = error
        .values
        .iter()
        .map(|&v| Complex::new(v - mean, T::zero()))
        .collect();

    let mut planner = FftPlanner::<T>::new();
    let fft = planner.plan_fft_forward(n);
    for row in data.chunks_exact_mut(n) {
        fft.process(row);
    }
    let mut column = vec![Complex::new(T::zero(), T::zero()); n];
    for x in 0..n {
        for y in 0..n {
            column[y] = data[y * n + x];
        }
        fft.process(&mut column);
        for y in 0..n {
            data[y * n + x] = column[y];
        }
    }

    let scale = count::<T>(n * n);
    let half = n / 2;
    let mut power = vec![T::zero(); n * n];
    for y in 0..n {
        for x in 0..n {
            let sx = (x + half) % n;
            let sy = (y + half) % n;
            power[sy * n + sx] = data[y * n + x].norm_sqr() / scale;
        }
    }
    Ok(PowerSpectrum { side: n, power })
}

/// Average spectrum over a stack of error images of equal size.
pub fn mean_power_spectrum<T: Real>(stack: &[ErrorImage<T>]) -> Result<PowerSpectrum<T>> {
    let Some(first) = stack.first() else {
        return Err(Error::DimensionMismatch("empty error stack".into()));
    };
    let n = check_square(first)?;
    let mut acc = vec![T::zero(); n * n];
    for image in stack {
        if image.width != n || image.height != n {
            return Err(Error::DimensionMismatch(
                "error images differ in size".into(),
            ));
        }
        let s = power_spectrum(image)?;
        for (a, p) in acc.iter_mut().zip(s.power) {
            *a = *a + p;
        }
    }
    let k = count::<T>(stack.len());
    Ok(PowerSpectrum {
        side: n,
        power: acc.into_iter().map(|p| p / k).collect(),
    })
}

/// One annulus of a radial profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialBin<T> {
    /// Frequency radius in samples, rounded to the nearest integer.
    pub radius: usize,
    pub mean_power: T,
    /// Number of frequency samples in the annulus.
    pub count: usize,
}

/// Annular means over every nonzero radius, corners included.
pub fn radial_profile_full<T: Real>(spectrum: &PowerSpectrum<T>) -> Vec<RadialBin<T>> {
    let n = spectrum.side;
    let half = (n / 2) as i64;
    let max_bin = ((2.0f64).sqrt() * half as f64).round() as usize;
    let mut sums = vec![T::zero(); max_bin + 1];
    let mut counts = vec![0usize; max_bin + 1];
    for y in 0..n {
        for x in 0..n {
            let fx = (x as i64 - half) as f64;
            let fy = (y as i64 - half) as f64;
            let bin = fx.hypot(fy).round() as usize;
            sums[bin] = sums[bin] + spectrum.at(x, y);
            counts[bin] += 1;
        }
    }
    (1..=max_bin)
        .filter(|&b| counts[b] > 0)
        .map(|b| RadialBin {
            radius: b,
            mean_power: sums[b] / count(counts[b]),
            count: counts[b],
        })
        .collect()
}

/// Annular means for radii `1..=side/2`; DC is excluded.
pub fn radial_profile<T: Real>(spectrum: &PowerSpectrum<T>) -> Vec<RadialBin<T>> {
    let half = spectrum.side / 2;
    radial_profile_full(spectrum)
        .into_iter()
        .filter(|b| b.radius <= half)
        .collect()
}

/// Mean of the bin means whose position in `profile` falls in the fraction
/// range `[from, to)` of its length. At least one bin is always used.
pub fn band_mean<T: Real>(profile: &[RadialBin<T>], from: f64, to: f64) -> T {
    let len = profile.len() as f64;
    let start = ((from * len).floor() as usize).min(profile.len().saturating_sub(1));
    let end = ((to * len).ceil() as usize).clamp(start + 1, profile.len());
    let band = &profile[start..end];
    band.iter().map(|b| b.mean_power).sum::<T>() / count(band.len())
}

/// Mean power of the lowest tenth of the profile.
pub fn low_band<T: Real>(profile: &[RadialBin<T>]) -> T {
    band_mean(profile, 0.0, 0.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noise(n: usize, seed: u64) -> ErrorImage<f64> {
        let values = (0..n * n)
            .map(|i| {
                let h = crate::hash::hash_words(seed, &[i as u64]);
                (h >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect();
        ErrorImage::new(n, n, values).unwrap()
    }

    #[test]
    fn constant_error_has_no_ac_energy() {
        let s = power_spectrum(&ErrorImage::constant(16, 16, 0.25f64)).unwrap();
        assert!(s.power.iter().all(|&p| p.abs() < 1e-25));
    }

    #[test]
    fn parseval() {
        let img = noise(32, 1);
        let s = power_spectrum(&img).unwrap();
        let expected = 32.0 * 32.0 * img.variance();
        assert!((s.total() - expected).abs() <= 1e-6 * expected);
        assert!(s.dc().abs() < 1e-20);
    }

    #[test]
    fn cosine_gives_two_peaks() {
        let n = 32;
        let f = 5;
        let values = (0..n * n)
            .map(|i| (std::f64::consts::TAU * f as f64 * (i % n) as f64 / n as f64).cos())
            .collect();
        let s = power_spectrum(&ErrorImage::new(n, n, values).unwrap()).unwrap();
        let c = n / 2;
        let peak = s.at(c + f, c);
        assert!((peak - s.at(c - f, c)).abs() < 1e-9);
        assert!((2.0 * peak - s.total()).abs() < 1e-9 * s.total());
    }

    #[test]
    fn profile_length_and_flatness() {
        let flat = PowerSpectrum {
            side: 16,
            power: vec![2.0f64; 256],
        };
        let p = radial_profile(&flat);
        assert_eq!(p.len(), 8);
        assert!(p.iter().all(|b| b.mean_power == 2.0));
        assert_eq!(p[0].radius, 1);
    }

    #[test]
    fn full_profile_recovers_variance() {
        let stack: Vec<_> = (0..4).map(|s| noise(32, s)).collect();
        let spectrum = mean_power_spectrum(&stack).unwrap();
        let from_profile: f64 = radial_profile_full(&spectrum)
            .iter()
            .map(|b| b.mean_power * b.count as f64)
            .sum();
        let var = stack.iter().map(ErrorImage::variance).sum::<f64>() / 4.0;
        assert!((from_profile - 1024.0 * var).abs() <= 1e-9 * from_profile);
    }

    #[test]
    fn non_square_rejected() {
        let img = ErrorImage::constant(16, 8, 0.0f64);
        assert!(matches!(power_spectrum(&img), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn bands() {
        let profile: Vec<RadialBin<f64>> = (1..=32)
            .map(|r| RadialBin {
                radius: r,
                mean_power: r as f64,
                count: 1,
            })
            .collect();
        assert_eq!(low_band(&profile), 2.5);
        assert_eq!(
            band_mean(&profile, 0.4, 0.6),
            (13..=20).sum::<usize>() as f64 / 8.0
        );
    }
}
