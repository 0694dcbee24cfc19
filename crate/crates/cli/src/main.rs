//! `screen-sampler`: optimize scramble tiles and evaluate screen-space
//! samplers.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 I/O error
//! (including unreadable or corrupt input files), 3 internal error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Io(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Config(m) | CliError::Io(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<screen_sampler::Error> for CliError {
    fn from(e: screen_sampler::Error) -> Self {
        use screen_sampler::Error as E;
        match e {
            E::Io { .. } | E::Format { .. } => CliError::Io(e.to_string()),
            E::NotPowerOfTwo { .. }
            | E::PairOutOfRange { .. }
            | E::InvalidSigma(_)
            | E::KernelTooLarge { .. }
            | E::NotSquare { .. }
            | E::NotOptimizable(_)
            | E::InvalidConfig(_) => CliError::Config(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "screen-sampler",
    version,
    about = "Blue-noise screen-space sampler tiles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize a scramble tile; writes tile.bnt, trace.csv and optimize.cfg.
    Optimize {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Denoised-RMSE curves and error spectra for one or more tiles.
    Evaluate {
        #[arg(required = true)]
        tiles: Vec<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Error power spectrum and radial profile of one sampler.
    Spectrum {
        /// Tile to analyze; a random tile of the configured size if omitted.
        tile: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Evaluates 4D Heaviside products consuming two padded pairs.
    PadDemo {
        tile: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Converts a BNT1 tile to PFM (u, v, 0) or CSV.
    ExportTile {
        tile: PathBuf,
        #[arg(long, default_value = "pfm", value_parser = ["pfm", "csv"])]
        format: String,
        #[command(flatten)]
        run: RunArgs,
    },
}

/// Flags mirroring the config keys. Anything else goes through `--set`.
#[derive(Args, Default)]
struct RunArgs {
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Sets both tile width and height.
    #[arg(long)]
    tile_size: Option<String>,
    #[arg(long)]
    spp: Option<String>,
    /// Integrands in the optimization bank.
    #[arg(long)]
    integrands: Option<String>,
    /// rank1, sobol-xor or white-noise.
    #[arg(long)]
    sampler: Option<String>,
    /// Integer generating vector `x,y` with y odd.
    #[arg(long)]
    generator: Option<String>,
    /// seq or par.
    #[arg(long)]
    mode: Option<String>,
    /// Parallel passes, or proposals in seq mode.
    #[arg(long)]
    passes: Option<String>,
    /// Pixels per parallel pass, or `auto` for a quarter of the tile.
    #[arg(long)]
    budget: Option<String>,
    /// Optimizer seed.
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    pairs: Option<String>,
    /// Comma-separated denoising sigmas.
    #[arg(long)]
    sigmas: Option<String>,
    /// heaviside, bump or product.
    #[arg(long)]
    family: Option<String>,
    /// Comma-separated list of white-noise, random, sobol-xor.
    #[arg(long)]
    baselines: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Any config key, as `key=value`. May be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            cfg.apply_text(&text, &path.display().to_string())?;
        }
        let flags = [
            ("tile_size", &self.tile_size),
            ("spp", &self.spp),
            ("integrands", &self.integrands),
            ("sampler", &self.sampler),
            ("generator", &self.generator),
            ("mode", &self.mode),
            ("passes", &self.passes),
            ("budget", &self.budget),
            ("seed", &self.seed),
            ("pairs", &self.pairs),
            ("sigmas", &self.sigmas),
            ("family", &self.family),
            ("baselines", &self.baselines),
            ("out", &self.out),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        for item in &self.set {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got `{item}`")))?;
            cfg.set(key.trim(), value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Optimize { run } => commands::optimize(&run.resolve()?),
        Command::Evaluate { tiles, run } => commands::evaluate(&run.resolve()?, &tiles),
        Command::Spectrum { tile, run } => commands::spectrum(&run.resolve()?, tile.as_deref()),
        Command::PadDemo { tile, run } => commands::pad_demo(&run.resolve()?, &tile),
        Command::ExportTile { tile, format, run } => {
            commands::export_tile(&run.resolve()?, &tile, &format)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("screen-sampler: {e}");
            ExitCode::from(e.code())
        }
    }
}
