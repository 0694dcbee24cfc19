//! Flat `key = value` run configuration.
//!
//! Settings are applied in order: defaults, then a config file, then
//! command-line flags. [`RunConfig::to_text`] writes every key, so a saved
//! record reproduces the run on its own.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use screen_sampler::analysis::default_sigmas;
use screen_sampler::optimizer::{LossParams, Mode, Objective, OptimizerConfig};
use screen_sampler::{GeneratorVector, SamplerKind, SamplerSpec};

use crate::CliError;

/// Integrand family used for evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Heaviside,
    Bump,
    Product,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Heaviside => "heaviside",
            Family::Bump => "bump",
            Family::Product => "product",
        }
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "heaviside" => Ok(Family::Heaviside),
            "bump" => Ok(Family::Bump),
            "product" => Ok(Family::Product),
            other => Err(format!("unknown integrand family `{other}`")),
        }
    }
}

/// Extra samplers reported next to the evaluated tiles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Baseline {
    /// I.i.d. uniform samples.
    WhiteNoise,
    /// The configured sampler on an unoptimized random tile.
    Random,
    /// Owen-scrambled Sobol with XOR scrambling, on a tile optimized with the
    /// configured optimizer settings.
    SobolXor,
}

impl Baseline {
    pub fn name(self) -> &'static str {
        match self {
            Baseline::WhiteNoise => "white-noise",
            Baseline::Random => "random",
            Baseline::SobolXor => "sobol-xor",
        }
    }
}

impl FromStr for Baseline {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "white-noise" => Ok(Baseline::WhiteNoise),
            "random" => Ok(Baseline::Random),
            "sobol-xor" => Ok(Baseline::SobolXor),
            other => Err(format!("unknown baseline `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub width: usize,
    pub height: usize,
    pub spp: u32,
    /// Integrands in the optimization bank.
    pub integrands: usize,
    pub sampler: SamplerKind,
    pub generator: GeneratorVector,
    pub pairs: usize,
    pub mode: Mode,
    /// Parallel passes, or proposals in sequential mode.
    pub passes: usize,
    pub budget: Option<usize>,
    pub kernel_width: f64,
    pub objective: Objective,
    pub toroidal: bool,
    pub sigmas: Vec<f64>,
    /// Optimizer seed.
    pub seed: u64,
    pub tile_seed: u64,
    pub bank_seed: u64,
    pub sampler_seed: u64,
    pub family: Family,
    pub eval_integrands: usize,
    pub eval_seeds: Vec<u64>,
    pub baselines: Vec<Baseline>,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            width: 64,
            height: 64,
            spp: 16,
            integrands: 64,
            sampler: SamplerKind::Rank1,
            generator: GeneratorVector::default(),
            pairs: 1,
            mode: Mode::Parallel,
            passes: 2000,
            budget: None,
            kernel_width: 2.1,
            objective: Objective::Repulsive,
            toroidal: true,
            sigmas: default_sigmas(),
            seed: 1,
            tile_seed: 2,
            bank_seed: 3,
            sampler_seed: 0,
            family: Family::Heaviside,
            eval_integrands: 64,
            eval_seeds: vec![101, 102, 103, 104],
            baselines: Vec::new(),
            out: PathBuf::from("out"),
        }
    }
}

/// Keys in the order they are written.
pub const KEYS: &[&str] = &[
    "width",
    "height",
    "spp",
    "integrands",
    "sampler",
    "generator",
    "pairs",
    "mode",
    "passes",
    "budget",
    "kernel_width",
    "objective",
    "toroidal",
    "sigmas",
    "seed",
    "tile_seed",
    "bank_seed",
    "sampler_seed",
    "family",
    "eval_integrands",
    "eval_seeds",
    "baselines",
    "out",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, CliError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let value = value.trim();
        match key {
            "width" => self.width = parse(key, value)?,
            "height" => self.height = parse(key, value)?,
            "tile_size" => {
                self.width = parse(key, value)?;
                self.height = self.width;
            }
            "spp" => self.spp = parse(key, value)?,
            "integrands" => self.integrands = parse(key, value)?,
            "sampler" => {
                self.sampler = value
                    .parse()
                    .map_err(|e: screen_sampler::Error| CliError::Config(e.to_string()))?
            }
            "generator" => {
                let parts: Vec<u32> = parse_list(key, value)?;
                let [x, y] = parts[..] else {
                    return Err(CliError::Config(format!(
                        "`generator` takes two integers, got `{value}`"
                    )));
                };
                self.generator =
                    GeneratorVector::new(x, y).map_err(|e| CliError::Config(e.to_string()))?;
            }
            "pairs" => self.pairs = parse(key, value)?,
            "mode" => {
                self.mode = value
                    .parse()
                    .map_err(|e: screen_sampler::Error| CliError::Config(e.to_string()))?
            }
            "passes" => self.passes = parse(key, value)?,
            "budget" => {
                self.budget = if value == "auto" {
                    None
                } else {
                    Some(parse(key, value)?)
                }
            }
            "kernel_width" => self.kernel_width = parse(key, value)?,
            "objective" => {
                self.objective = value
                    .parse()
                    .map_err(|e: screen_sampler::Error| CliError::Config(e.to_string()))?
            }
            "toroidal" => self.toroidal = parse(key, value)?,
            "sigmas" => self.sigmas = parse_list(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "tile_seed" => self.tile_seed = parse(key, value)?,
            "bank_seed" => self.bank_seed = parse(key, value)?,
            "sampler_seed" => self.sampler_seed = parse(key, value)?,
            "family" => self.family = value.parse().map_err(CliError::Config)?,
            "eval_integrands" => self.eval_integrands = parse(key, value)?,
            "eval_seeds" => self.eval_seeds = parse_list(key, value)?,
            "baselines" => {
                self.baselines = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse().map_err(CliError::Config))
                    .collect::<Result<_, _>>()?
            }
            "out" => self.out = PathBuf::from(value),
            other => return Err(CliError::Config(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines. Blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<(), CliError> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "{origin}:{}: expected `key = value`",
                    n + 1
                )));
            };
            self.set(key.trim(), value)
                .map_err(|e| CliError::Config(format!("{origin}:{}: {}", n + 1, e.message())))?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for key in KEYS {
            let value = match *key {
                "width" => self.width.to_string(),
                "height" => self.height.to_string(),
                "spp" => self.spp.to_string(),
                "integrands" => self.integrands.to_string(),
                "sampler" => self.sampler.to_string(),
                "generator" => {
                    let (x, y) = self.generator.components();
                    format!("{x},{y}")
                }
                "pairs" => self.pairs.to_string(),
                "mode" => self.mode.to_string(),
                "passes" => self.passes.to_string(),
                "budget" => self
                    .budget
                    .map_or_else(|| "auto".to_string(), |b| b.to_string()),
                "kernel_width" => self.kernel_width.to_string(),
                "objective" => self.objective.name().to_string(),
                "toroidal" => self.toroidal.to_string(),
                "sigmas" => join(&self.sigmas),
                "seed" => self.seed.to_string(),
                "tile_seed" => self.tile_seed.to_string(),
                "bank_seed" => self.bank_seed.to_string(),
                "sampler_seed" => self.sampler_seed.to_string(),
                "family" => self.family.name().to_string(),
                "eval_integrands" => self.eval_integrands.to_string(),
                "eval_seeds" => join(&self.eval_seeds),
                "baselines" => self
                    .baselines
                    .iter()
                    .map(|b| b.name())
                    .collect::<Vec<_>>()
                    .join(","),
                "out" => self.out.display().to_string(),
                _ => unreachable!("every key is listed"),
            };
            let _ = writeln!(s, "{key} = {value}");
        }
        s
    }

    pub fn sampler_spec(&self) -> SamplerSpec {
        SamplerSpec::new(self.sampler, self.spp, self.sampler_seed)
            .with_generator(self.generator)
            .with_pairs(self.pairs)
    }

    pub fn loss_params(&self) -> LossParams<f64> {
        let mut params = LossParams::with_width(self.kernel_width);
        params.toroidal = self.toroidal;
        params.objective = self.objective;
        params
    }

    pub fn optimizer_config(&self) -> OptimizerConfig {
        OptimizerConfig {
            mode: self.mode,
            passes: self.passes,
            swap_pixel_budget: self.budget,
            seed: self.seed,
        }
    }

    /// Checks every setting against the library's preconditions.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        for (what, v) in [("width", self.width), ("height", self.height)] {
            if !v.is_power_of_two() {
                return bad(format!("{what} must be a power of two, got {v}"));
            }
        }
        if self.integrands == 0 || self.eval_integrands == 0 {
            return bad("integrand counts must be at least 1".into());
        }
        if self.eval_seeds.is_empty() {
            return bad("eval_seeds must list at least one seed".into());
        }
        if self.sigmas.is_empty() {
            return bad("sigmas must not be empty".into());
        }
        if self.sigmas.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return bad("sigmas must be positive and finite".into());
        }
        if self.sigmas.windows(2).any(|w| w[1] <= w[0]) {
            return bad("sigmas must be strictly increasing".into());
        }
        if self.family == Family::Product && self.pairs < 2 {
            return bad("family = product needs pairs >= 2".into());
        }
        self.sampler_spec().validate().map_err(CliError::from)?;
        self.loss_params().validate().map_err(CliError::from)?;
        self.optimizer_config()
            .validate(self.width * self.height)
            .map_err(CliError::from)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.set("tile_size", "32").unwrap();
        cfg.set("budget", "64").unwrap();
        cfg.set("baselines", "white-noise, sobol-xor").unwrap();
        cfg.set("sigmas", "0.5,1.25,3").unwrap();
        cfg.set("generator", "1,41").unwrap();
        let mut back = RunConfig::default();
        back.apply_text(&cfg.to_text(), "record").unwrap();
        assert_eq!(back, cfg);
        assert_eq!(RunConfig::default().to_text().lines().count(), KEYS.len());
    }

    #[test]
    fn comments_and_errors() {
        let mut cfg = RunConfig::default();
        cfg.apply_text("# run\n\nspp = 8 # low\n", "f").unwrap();
        assert_eq!(cfg.spp, 8);
        assert!(cfg.apply_text("spp 8", "f").is_err());
        assert!(cfg.apply_text("colour = red", "f").is_err());
        assert!(cfg.set("generator", "2,4").is_err());
        assert!(cfg.set("mode", "fast").is_err());
    }

    #[test]
    fn validation() {
        assert!(RunConfig::default().validate().is_ok());
        let mut cfg = RunConfig::default();
        cfg.width = 48;
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.budget = Some(7);
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.sigmas = vec![2.0, 1.0];
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.family = Family::Product;
        assert!(cfg.validate().is_err());
        cfg.pairs = 2;
        assert!(cfg.validate().is_ok());
    }
}
