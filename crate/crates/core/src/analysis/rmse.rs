use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::integrands::{Integrand, IntegrandBank};
use crate::sampler::{SamplerSpec, ScrambleTile};
use crate::scalar::{count, lit, Real};

use super::{blur_periodic, error_images, ErrorImage};

/// Smallest and largest denoising sigma of the default sweep.
pub const SIGMA_RANGE: (f64, f64) = (0.25, 20.0);
/// Number of points in the default sweep.
pub const SIGMA_STEPS: usize = 16;

/// `steps` log-spaced values from `lo` to `hi` inclusive.
pub fn log_spaced<T: Real>(lo: f64, hi: f64, steps: usize) -> Vec<T> {
    if steps == 1 {
        return vec![lit(lo)];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..steps)
        .map(|i| lit((a + (b - a) * i as f64 / (steps - 1) as f64).exp()))
        .collect()
}

/// The default sweep: 16 log-spaced sigmas in `[0.25, 20]`.
pub fn default_sigmas<T: Real>() -> Vec<T> {
    log_spaced(SIGMA_RANGE.0, SIGMA_RANGE.1, SIGMA_STEPS)
}

pub(crate) fn check_sigmas<T: Real>(sigmas: &[T]) -> Result<()> {
    if sigmas.is_empty() {
        return Err(Error::InvalidConfig("sigma list is empty".into()));
    }
    if let Some(&s) = sigmas.iter().find(|s| !(**s > T::zero()) || !s.is_finite()) {
        return Err(Error::InvalidSigma(s.to_f64().unwrap_or(f64::NAN)));
    }
    if sigmas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig(
            "sigma values must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// RMSE after denoising, averaged over a stack of error images.
///
/// For each sigma, every image is blurred, its RMS taken over pixels, and
/// the RMS values averaged across the stack.
pub fn rmse_curve_from_errors<T: Real>(
    errors: &[ErrorImage<T>],
    sigmas: &[T],
) -> Result<Vec<(T, T)>> {
    check_sigmas(sigmas)?;
    if errors.is_empty() {
        return Err(Error::DimensionMismatch("empty error stack".into()));
    }
    sigmas
        .iter()
        .map(|&sigma| {
            let per_image: Vec<T> = errors
                .par_iter()
                .map(|e| blur_periodic(e, sigma).map(|b| b.rms()))
                .collect::<Result<_>>()?;
            let mean = per_image.into_iter().sum::<T>() / count(errors.len());
            Ok((sigma, mean))
        })
        .collect()
}

/// Denoised RMSE of `spec` on `tile` for each sigma, over the integrands of
/// `bank`.
pub fn rmse_curve<T: Real, F: Integrand<T>>(
    spec: &SamplerSpec,
    tile: &ScrambleTile<T>,
    bank: &IntegrandBank<T, F>,
    sigmas: &[T],
) -> Result<Vec<(T, T)>> {
    check_sigmas(sigmas)?;
    let errors = error_images(spec, tile, bank)?;
    rmse_curve_from_errors(&errors, sigmas)
}

/// Per-pixel RMSE of the estimator without any denoising, averaged over the
/// stack.
pub fn pixel_rmse<T: Real>(errors: &[ErrorImage<T>]) -> T {
    errors.iter().map(ErrorImage::rms).sum::<T>() / count(errors.len())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
