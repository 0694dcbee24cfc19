//! Screen-space samplers whose Monte-Carlo error is distributed as blue
//! noise.
//!
//! Every pixel of a periodic tile stores a shift `u_p` that scrambles a
//! shared rank-1 lattice, `s_p^k = mod(s^k + u_p, 1)`. The arrangement of
//! the shifts over the tile is optimized by pixel swaps so that neighboring
//! pixels integrate a bank of random Heavisides with dissimilar errors.
//! The [`analysis`] module measures the result by error power spectra and by
//! the RMSE left after Gaussian denoising.
//!
//! All numeric code is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix the usual choice.

pub mod analysis;
pub mod error;
pub mod hash;
pub mod integrands;
pub mod optimizer;
pub mod sampler;
pub mod scalar;

pub use error::{Error, Result};
pub use integrands::{
    BumpIntegrand, HeavisideIntegrand, Integrand, IntegrandBank, ProductIntegrand,
};
pub use sampler::{GeneratorVector, Point2, SamplerKind, SamplerSpec, ScrambleTile};
pub use scalar::Real;

/// Single-precision point.
pub type Point2f = Point2<f32>;
/// Double-precision point.
pub type Point2d = Point2<f64>;
/// Single-precision tile.
pub type Tile32 = ScrambleTile<f32>;
/// Double-precision tile, used by the command-line tool.
pub type Tile = ScrambleTile<f64>;
/// Double-precision Heaviside bank.
pub type Bank = integrands::HeavisideBank<f64>;
