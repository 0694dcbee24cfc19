//! Sampler evaluation: denoised RMSE curves and error power spectra.
//!
//! A sampler is judged by how much error is left after low-pass
//! filtering its per-pixel estimates with Gaussians of increasing width,
//! and by how little of its error power sits at low frequencies.

mod image;
mod kernel;
pub mod pfm;
mod report;
mod rmse;
mod spectrum;

pub use image::{error_images, estimate_grid, ErrorImage};
pub use kernel::{blur_periodic, convolve_toroidal, gaussian_kernel, gaussian_weights_1d, Kernel};
pub use report::{
    evaluate_sampler, smooth_bank_eval, write_profile_csv, write_rmse_csv, EvaluationReport,
    ReportMetadata, SamplerReport,
};
pub use rmse::{
    default_sigmas, log_log_slope, log_spaced, pixel_rmse, rmse_curve, rmse_curve_from_errors,
    SIGMA_RANGE, SIGMA_STEPS,
};
pub use spectrum::{
    band_mean, low_band, mean_power_spectrum, power_spectrum, radial_profile, radial_profile_full,
    PowerSpectrum, RadialBin,
};
