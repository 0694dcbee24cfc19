use std::io::{self, Write};

use crate::error::Result;
use crate::integrands::{make_bump_bank, Integrand, IntegrandBank};
use crate::sampler::{SamplerSpec, ScrambleTile};
use crate::scalar::Real;

use super::{
    error_images, mean_power_spectrum, pixel_rmse, radial_profile, rmse_curve_from_errors,
    ErrorImage, PowerSpectrum, RadialBin,
};

#[derive(Clone, Debug, PartialEq)]
pub struct ReportMetadata {
    pub spp: u32,
    pub integrands: usize,
    pub bank_seeds: Vec<u64>,
    pub width: usize,
    pub height: usize,
}

/// Everything measured for one sampler.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplerReport<T> {
    pub name: String,
    /// `(sigma, rmse)` with strictly increasing sigma.
    pub curve: Vec<(T, T)>,
    /// Radial profile of the mean error spectrum, DC excluded.
    pub profile: Vec<RadialBin<T>>,
    /// RMSE without denoising.
    pub pixel_rmse: T,
    pub spectrum: PowerSpectrum<T>,
    /// Error map of the first integrand, for inspection.
    pub first_error: ErrorImage<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationReport<T> {
    pub metadata: ReportMetadata,
    pub samplers: Vec<SamplerReport<T>>,
}

/// Evaluates one sampler over several integrand banks.
///
/// RMSE curves and spectra are computed from the same stack of error
/// images, pooled across all banks.
pub fn evaluate_sampler<T: Real, F: Integrand<T>>(
    name: &str,
    spec: &SamplerSpec,
    tile: &ScrambleTile<T>,
    banks: &[IntegrandBank<T, F>],
    sigmas: &[T],
) -> Result<SamplerReport<T>> {
    let mut stack = Vec::new();
    for bank in banks {
        stack.extend(error_images(spec, tile, bank)?);
    }
    let curve = rmse_curve_from_errors(&stack, sigmas)?;
    let spectrum = mean_power_spectrum(&stack)?;
    Ok(SamplerReport {
        name: name.to_string(),
        curve,
        profile: radial_profile(&spectrum),
        pixel_rmse: pixel_rmse(&stack),
        spectrum,
        first_error: stack.swap_remove(0),
    })
}

/// Re-evaluates a tile on the smooth Gaussian-bump family, with `m` bumps
/// per bank seed. The tile is not re-optimized.
pub fn smooth_bank_eval<T: Real>(
    name: &str,
    tile: &ScrambleTile<T>,
    spec: &SamplerSpec,
    sigmas: &[T],
    m: usize,
    bank_seeds: &[u64],
) -> Result<EvaluationReport<T>> {
    let banks = bank_seeds
        .iter()
        .map(|&s| make_bump_bank::<T>(m, s))
        .collect::<Result<Vec<_>>>()?;
    let report = evaluate_sampler(name, spec, tile, &banks, sigmas)?;
    Ok(EvaluationReport {
        metadata: ReportMetadata {
            spp: spec.spp,
            integrands: m,
            bank_seeds: bank_seeds.to_vec(),
            width: tile.width(),
            height: tile.height(),
        },
        samplers: vec![report],
    })
}

/// Writes `sampler,sigma,rmse` rows.
pub fn write_rmse_csv<T: Real, W: Write>(
    reports: &[SamplerReport<T>],
    mut out: W,
) -> io::Result<()> {
    writeln!(out, "sampler,sigma,rmse")?;
    for r in reports {
        for &(sigma, rmse) in &r.curve {
            writeln!(out, "{},{},{}", r.name, sigma, rmse)?;
        }
    }
    Ok(())
}

/// Writes `sampler,bin,power` rows.
pub fn write_profile_csv<T: Real, W: Write>(
    reports: &[SamplerReport<T>],
    mut out: W,
) -> io::Result<()> {
    writeln!(out, "sampler,bin,power")?;
    for r in reports {
        for b in &r.profile {
            writeln!(out, "{},{},{}", r.name, b.radius, b.mean_power)?;
        }
    }
    Ok(())
}
