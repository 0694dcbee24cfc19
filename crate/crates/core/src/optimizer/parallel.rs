//! Collision-free parallel swap passes.
//!
//! Each pass tests many disjoint pixel couples at once. Every couple's
//! delta is computed against the tile as it was at the start of the pass,
//! then all improving couples are swapped. Couples are disjoint, so the
//! writes never conflict and the outcome is independent of how the work is
//! split across threads. Neighboring couples may interact, so a pass can
//! raise the objective.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hash::hash_words;
use crate::sampler::{check_pow2, ScrambleTile};
use crate::scalar::Real;

use super::{EstimateCache, LossModel, LossParams, OptimizerConfig, Outcome, TraceRecord};

/// Random permutation of `0..pixel_count`, computed once per run.
pub fn base_permutation(pixel_count: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..pixel_count).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(hash_words(seed, &[0x7065_726d]));
    perm.shuffle(&mut rng);
    perm
}

/// XOR key of pass `pass_index`, masked to the index range.
pub fn pass_key(pixel_count: usize, pass_index: usize, seed: u64) -> usize {
    (hash_words(seed, &[0x6b65_79, pass_index as u64]) as usize) & (pixel_count - 1)
}

/// Pairs consecutive entries of `permutation XOR key` and returns the first
/// `budget / 2` couples.
pub fn couples_with_key(
    permutation: &[usize],
    key: usize,
    budget: usize,
) -> Result<Vec<(usize, usize)>> {
    let n = permutation.len();
    check_pow2("pixel count", n)?;
    if budget % 2 != 0 || budget > n {
        return Err(Error::InvalidConfig(format!(
            "swap budget {budget} must be even and at most {n}"
        )));
    }
    let mask = n - 1;
    Ok(permutation
        .chunks_exact(2)
        .take(budget / 2)
        .map(|c| ((c[0] ^ key) & mask, (c[1] ^ key) & mask))
        .collect())
}

/// Disjoint swap candidates for one pass.
pub fn generate_couples(
    pixel_count: usize,
    pass_index: usize,
    permutation: &[usize],
    seed: u64,
    budget: usize,
) -> Result<Vec<(usize, usize)>> {
    check_pow2("pixel count", pixel_count)?;
    if permutation.len() != pixel_count {
        return Err(Error::DimensionMismatch(format!(
            "permutation of {} entries for {pixel_count} pixels",
            permutation.len()
        )));
    }
    couples_with_key(permutation, pass_key(pixel_count, pass_index, seed), budget)
}

fn check_disjoint(couples: &[(usize, usize)], pixel_count: usize) -> Result<()> {
    let mut used = vec![false; pixel_count];
    for &(p, q) in couples {
        for index in [p, q] {
            if index >= pixel_count {
                return Err(Error::PixelOutOfRange { index, pixel_count });
            }
            if used[index] {
                return Err(Error::OverlappingCouples(index));
            }
            used[index] = true;
        }
    }
    Ok(())
}

/// Result of one parallel pass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PassOutcome<T> {
    pub accepted: usize,
    /// Exact objective change of the pass.
    pub change: T,
}

/// Runs one pass over disjoint `couples`.
pub fn parallel_pass<T: Real>(
    model: &LossModel<T>,
    tile: &mut ScrambleTile<T>,
    cache: &mut EstimateCache<T>,
    couples: &[(usize, usize)],
) -> Result<PassOutcome<T>> {
    let n = tile.pixel_count();
    if cache.pixel_count() != n || model.pixel_count() != n {
        return Err(Error::DimensionMismatch(
            "tile, cache and loss model disagree".into(),
        ));
    }
    check_disjoint(couples, n)?;

    let snapshot: &EstimateCache<T> = cache;
    let deltas: Vec<T> = couples
        .par_iter()
        .map(|&(p, q)| model.objective_delta_unchecked(snapshot, p, q))
        .collect();

    let mut accepted = 0;
    let mut change = T::zero();
    for (&(p, q), &delta) in couples.iter().zip(&deltas) {
        if delta < T::zero() {
            // The change actually realized, given the swaps applied so far.
            change = change + model.objective_delta_unchecked(cache, p, q);
            tile.swap(p, q);
            cache.swap(p, q);
            accepted += 1;
        }
    }
    Ok(PassOutcome { accepted, change })
}

/// Runs `config.passes` parallel passes. The trace holds the initial
/// objective at step 0 and the objective after every pass.
pub fn parallel_optimize<T: Real>(
    mut tile: ScrambleTile<T>,
    mut cache: EstimateCache<T>,
    params: &LossParams<T>,
    config: &OptimizerConfig,
) -> Result<Outcome<T>> {
    let n = tile.pixel_count();
    config.validate(n)?;
    let budget = config.budget_for(n);
    let model = LossModel::for_tile(&tile, params)?;
    let permutation = base_permutation(n, config.seed);
    let mut objective = model.objective(&cache)?;
    let mut trace = Vec::with_capacity(config.passes + 1);
    trace.push(TraceRecord {
        step: 0,
        objective,
        accepted: 0,
    });
    let mut accepted = 0;
    for pass in 1..=config.passes {
        let couples = generate_couples(n, pass, &permutation, config.seed, budget)?;
        let outcome = parallel_pass(&model, &mut tile, &mut cache, &couples)?;
        objective = objective + outcome.change;
        accepted += outcome.accepted;
        trace.push(TraceRecord {
            step: pass,
            objective,
            accepted: outcome.accepted,
        });
    }
    Ok(Outcome {
        tile,
        cache,
        trace,
        accepted,
    })
}
