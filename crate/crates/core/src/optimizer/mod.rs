//! Swap optimization of the scramble tile.
//!
//! [`sequential_optimize`] is the reference greedy optimizer.
//! [`parallel_optimize`] tests a budget of disjoint couples per pass against
//! a snapshot of the tile and is deterministic for any thread count.

mod cache;
mod loss;
mod parallel;
mod sequential;

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

pub use cache::EstimateCache;
pub use loss::{
    loss_delta_swap, loss_full, KernelConvention, LossModel, LossParams, Objective, DROPPED_WEIGHT,
};
pub use parallel::{
    base_permutation, couples_with_key, generate_couples, parallel_optimize, parallel_pass,
    pass_key, PassOutcome,
};
pub use sequential::{greedy_apply, sequential_optimize};

use crate::error::{Error, Result};
use crate::integrands::{Integrand, IntegrandBank};
use crate::sampler::{SamplerSpec, ScrambleTile};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    Sequential,
    #[default]
    Parallel,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Sequential => "seq",
            Mode::Parallel => "par",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "seq" | "sequential" => Ok(Mode::Sequential),
            "par" | "parallel" => Ok(Mode::Parallel),
            other => Err(Error::InvalidConfig(format!(
                "unknown optimizer mode `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OptimizerConfig {
    pub mode: Mode,
    /// Passes in parallel mode, single-swap proposals in sequential mode.
    pub passes: usize,
    /// Pixels tested per parallel pass; `None` means a quarter of the tile.
    pub swap_pixel_budget: Option<usize>,
    pub seed: u64,
}

impl OptimizerConfig {
    pub fn sequential(proposals: usize, seed: u64) -> Self {
        Self {
            mode: Mode::Sequential,
            passes: proposals,
            swap_pixel_budget: None,
            seed,
        }
    }

    pub fn parallel(passes: usize, budget: Option<usize>, seed: u64) -> Self {
        Self {
            mode: Mode::Parallel,
            passes,
            swap_pixel_budget: budget,
            seed,
        }
    }

    pub fn budget_for(&self, pixel_count: usize) -> usize {
        self.swap_pixel_budget
            .unwrap_or_else(|| (pixel_count / 4).max(2) & !1)
    }

    pub fn validate(&self, pixel_count: usize) -> Result<()> {
        crate::sampler::check_pow2("pixel count", pixel_count)?;
        if self.mode == Mode::Parallel {
            let budget = self.budget_for(pixel_count);
            if budget < 2 || budget % 2 != 0 || budget > pixel_count {
                return Err(Error::InvalidConfig(format!(
                    "swap budget {budget} must be even, at least 2 and at most {pixel_count}"
                )));
            }
        }
        Ok(())
    }
}

/// One row of an optimization trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRecord<T> {
    /// Pass index (parallel) or proposal index (sequential); 0 is the start.
    pub step: usize,
    /// Objective value after this step; see [`Objective`].
    pub objective: T,
    /// Swaps accepted at this step.
    pub accepted: usize,
}

#[derive(Clone, Debug)]
pub struct Outcome<T> {
    pub tile: ScrambleTile<T>,
    pub cache: EstimateCache<T>,
    pub trace: Vec<TraceRecord<T>>,
    pub accepted: usize,
}

impl<T: Real> Outcome<T> {
    pub fn initial_objective(&self) -> T {
        self.trace[0].objective
    }

    pub fn final_objective(&self) -> T {
        self.trace
            .last()
            .expect("trace starts with the initial value")
            .objective
    }
}

/// Builds the cache and runs the optimizer selected by `config.mode`.
pub fn optimize<T: Real, F: Integrand<T>>(
    spec: &SamplerSpec,
    bank: &IntegrandBank<T, F>,
    tile: ScrambleTile<T>,
    params: &LossParams<T>,
    config: &OptimizerConfig,
) -> Result<Outcome<T>> {
    let cache = EstimateCache::build(spec, bank, &tile)?;
    match config.mode {
        Mode::Sequential => sequential_optimize(tile, cache, params, config),
        Mode::Parallel => parallel_optimize(tile, cache, params, config),
    }
}

/// Writes `pass_index,loss,accepted_swaps` rows. The `loss` column holds the
/// objective.
pub fn write_trace_csv<T: Real, W: Write>(trace: &[TraceRecord<T>], mut out: W) -> io::Result<()> {
    writeln!(out, "pass_index,loss,accepted_swaps")?;
    for r in trace {
        writeln!(out, "{},{},{}", r.step, r.objective, r.accepted)?;
    }
    Ok(())
}
