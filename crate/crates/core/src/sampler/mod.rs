//! Main sequences, per-pixel scrambling and the padded sampler interface.

mod point;
mod scramble;
mod sequence;
mod spec;
mod tile;

pub use point::Point2;
pub use scramble::{shift_scramble, xor_scramble};
pub use sequence::{
    owen_scramble, owen_scramble_rev, radical_inverse_bits, rank1_bits, rank1_point, shuffle_index,
    sobol_bits, sobol_owen_bits, sobol_owen_point, sobol_point, van_der_corput, GeneratorVector,
};
pub use spec::{SamplerKind, SamplerSpec};
pub use tile::{ScrambleTile, TILE_MAGIC};

pub(crate) use tile::check_pow2;
