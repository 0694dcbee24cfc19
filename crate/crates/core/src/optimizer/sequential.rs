use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::sampler::ScrambleTile;
use crate::scalar::Real;

use super::{EstimateCache, LossModel, LossParams, OptimizerConfig, Outcome, TraceRecord};

/// Greedy swap optimization: propose `config.passes` random pixel pairs and
/// keep each swap that strictly lowers the objective.
///
/// The trace holds the initial objective at step 0 followed by one record
/// per accepted swap, indexed by proposal number, so it never increases.
pub fn sequential_optimize<T: Real>(
    mut tile: ScrambleTile<T>,
    mut cache: EstimateCache<T>,
    params: &LossParams<T>,
    config: &OptimizerConfig,
) -> Result<Outcome<T>> {
    config.validate(tile.pixel_count())?;
    let model = LossModel::for_tile(&tile, params)?;
    let n = tile.pixel_count();
    let mut objective = model.objective(&cache)?;
    let mut trace = vec![TraceRecord {
        step: 0,
        objective,
        accepted: 0,
    }];
    let mut accepted = 0;
    if n >= 2 {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        for step in 1..=config.passes {
            let p = rng.gen_range(0..n);
            let mut q = rng.gen_range(0..n - 1);
            if q >= p {
                q += 1;
            }
            let delta = model.objective_delta_unchecked(&cache, p, q);
            if delta < T::zero() {
                tile.swap(p, q);
                cache.swap(p, q);
                objective = objective + delta;
                accepted += 1;
                trace.push(TraceRecord {
                    step,
                    objective,
                    accepted: 1,
                });
            }
        }
    }
    Ok(Outcome {
        tile,
        cache,
        trace,
        accepted,
    })
}

/// Applies `couples` one after another, keeping each swap that lowers the
/// objective of the live tile. Returns the accepted count and the objective
/// change.
pub fn greedy_apply<T: Real>(
    model: &LossModel<T>,
    tile: &mut ScrambleTile<T>,
    cache: &mut EstimateCache<T>,
    couples: &[(usize, usize)],
) -> Result<(usize, T)> {
    let mut accepted = 0;
    let mut change = T::zero();
    for &(p, q) in couples {
        let delta = model.objective_delta(cache, p, q)?;
        if delta < T::zero() {
            tile.swap(p, q);
            cache.swap(p, q);
            change = change + delta;
            accepted += 1;
        }
    }
    Ok((accepted, change))
}
