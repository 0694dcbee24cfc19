use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use screen_sampler::analysis::pfm::{write_pfm, write_pfm_gray};
use screen_sampler::analysis::{
    band_mean, evaluate_sampler, low_band, write_profile_csv, write_rmse_csv, SamplerReport,
};
use screen_sampler::integrands::{make_bank, make_bump_bank, make_product_bank};
use screen_sampler::optimizer::{self, loss_full, write_trace_csv, EstimateCache, Outcome};
use screen_sampler::{Integrand, IntegrandBank, SamplerKind, SamplerSpec, Tile};

use crate::config::{Baseline, Family, RunConfig};
use crate::CliError;

/// Files produced by a command, kept in memory until everything has been
/// computed, then written atomically one by one.
struct Outputs {
    dir: PathBuf,
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        }
    }

    fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    fn commit(self) -> Result<Vec<PathBuf>, CliError> {
        let io = |path: &Path, e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
        std::fs::create_dir_all(&self.dir).map_err(|e| io(&self.dir, e))?;
        let mut written = Vec::with_capacity(self.files.len());
        for (name, bytes) in self.files {
            let path = self.dir.join(name);
            let mut tmp =
                tempfile::NamedTempFile::new_in(&self.dir).map_err(|e| io(&self.dir, e))?;
            tmp.write_all(&bytes).map_err(|e| io(&path, e))?;
            tmp.persist(&path).map_err(|e| io(&path, e.error))?;
            written.push(path);
        }
        Ok(written)
    }
}

fn report_written(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn read_tile(path: &Path) -> Result<Tile, CliError> {
    Tile::read(path).map_err(|e| match e {
        screen_sampler::Error::Io { .. } => CliError::from(e),
        other => CliError::Io(format!("{}: {other}", path.display())),
    })
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "tile".into())
}

/// Makes `name` unique among `taken`.
fn unique(name: String, taken: &mut HashSet<String>) -> String {
    let mut candidate = name.clone();
    let mut n = 2;
    while !taken.insert(candidate.clone()) {
        candidate = format!("{name}-{n}");
        n += 1;
    }
    candidate
}

fn csv<F>(write: F) -> Vec<u8>
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    let mut buf = Vec::new();
    write(&mut buf).expect("writing to memory cannot fail");
    buf
}

fn white_noise_spec(cfg: &RunConfig) -> SamplerSpec {
    SamplerSpec::new(
        SamplerKind::WhiteNoise,
        cfg.spp,
        cfg.sampler_seed ^ 0x5748_4954,
    )
    .with_pairs(cfg.pairs)
}

fn run_optimizer(
    cfg: &RunConfig,
    spec: &SamplerSpec,
    width: usize,
    height: usize,
) -> Result<Outcome<f64>, CliError> {
    if !spec.kind.uses_tile() {
        return Err(CliError::Config(format!(
            "sampler {} has no tile to optimize",
            spec.kind
        )));
    }
    let tile = Tile::random(width, height, cfg.tile_seed)?;
    let bank = make_bank::<f64>(cfg.integrands, cfg.bank_seed)?;
    Ok(optimizer::optimize(
        spec,
        &bank,
        tile,
        &cfg.loss_params(),
        &cfg.optimizer_config(),
    )?)
}

fn optimize_tile(cfg: &RunConfig) -> Result<(Outcome<f64>, String), CliError> {
    let spec = cfg.sampler_spec();
    let start = Instant::now();
    let out = run_optimizer(cfg, &spec, cfg.width, cfg.height)?;
    let elapsed = start.elapsed();

    let params = cfg.loss_params();
    let bank = make_bank::<f64>(cfg.integrands, cfg.bank_seed)?;
    let initial_tile = Tile::random(cfg.width, cfg.height, cfg.tile_seed)?;
    let initial_cache = EstimateCache::build(&spec, &bank, &initial_tile)?;
    let loss_before = loss_full(&initial_tile, &initial_cache, &params)?;
    let loss_after = loss_full(&out.tile, &out.cache, &params)?;

    let mut summary = String::new();
    let _ = writeln!(
        summary,
        "{}x{} {} tile, {} mode, {} passes, {} swaps accepted",
        cfg.width, cfg.height, spec.kind, cfg.mode, cfg.passes, out.accepted
    );
    let _ = writeln!(
        summary,
        "objective ({}): initial {:.6}, final {:.6}",
        cfg.objective.name(),
        out.initial_objective(),
        out.final_objective()
    );
    let _ = writeln!(
        summary,
        "pairwise loss: initial {loss_before:.6}, final {loss_after:.6}"
    );
    let _ = write!(summary, "wall time {:.3} s", elapsed.as_secs_f64());
    Ok((out, summary))
}

pub fn optimize(cfg: &RunConfig) -> Result<(), CliError> {
    let (out, summary) = optimize_tile(cfg)?;
    let mut files = Outputs::new(&cfg.out);
    files.add("tile.bnt", out.tile.to_bytes());
    files.add("trace.csv", csv(|b| write_trace_csv(&out.trace, b)));
    files.add("optimize.cfg", cfg.to_text().into_bytes());
    let written = files.commit()?;
    println!("{summary}");
    report_written(&written);
    Ok(())
}

type Entry = (String, SamplerSpec, Tile);

fn evaluate_with<F: Integrand<f64>>(
    banks: &[IntegrandBank<f64, F>],
    entries: &[Entry],
    sigmas: &[f64],
) -> Result<Vec<SamplerReport<f64>>, CliError> {
    entries
        .iter()
        .map(|(name, spec, tile)| Ok(evaluate_sampler(name, spec, tile, banks, sigmas)?))
        .collect()
}

fn evaluate_entries(
    cfg: &RunConfig,
    family: Family,
    entries: &[Entry],
) -> Result<Vec<SamplerReport<f64>>, CliError> {
    let m = cfg.eval_integrands;
    let seeds = &cfg.eval_seeds;
    match family {
        Family::Heaviside => {
            let banks = seeds
                .iter()
                .map(|&s| make_bank(m, s))
                .collect::<Result<Vec<_>, _>>()?;
            evaluate_with(&banks, entries, &cfg.sigmas)
        }
        Family::Bump => {
            let banks = seeds
                .iter()
                .map(|&s| make_bump_bank(m, s))
                .collect::<Result<Vec<_>, _>>()?;
            evaluate_with(&banks, entries, &cfg.sigmas)
        }
        Family::Product => {
            let banks = seeds
                .iter()
                .map(|&s| make_product_bank(m, s))
                .collect::<Result<Vec<_>, _>>()?;
            evaluate_with(&banks, entries, &cfg.sigmas)
        }
    }
}

fn spectrum_files(files: &mut Outputs, reports: &[SamplerReport<f64>]) {
    for r in reports {
        let s = &r.spectrum;
        files.add(
            format!("spectrum-{}.pfm", r.name),
            csv(|b| write_pfm_gray(s.side, s.side, &s.power, b)),
        );
        let e = &r.first_error;
        files.add(
            format!("error-{}.pfm", r.name),
            csv(|b| write_pfm_gray(e.width, e.height, &e.values, b)),
        );
    }
}

/// RMSE at the sweep point closest to `sigma` in log scale.
fn rmse_near(report: &SamplerReport<f64>, sigma: f64) -> (f64, f64) {
    report
        .curve
        .iter()
        .copied()
        .min_by(|a, b| {
            (a.0 / sigma)
                .ln()
                .abs()
                .total_cmp(&(b.0 / sigma).ln().abs())
        })
        .expect("curves are nonempty")
}

fn print_table(reports: &[SamplerReport<f64>]) {
    println!(
        "{:<20} {:>12} {:>20} {:>12} {:>12}",
        "sampler", "pixel rmse", "denoised rmse", "low band", "mid band"
    );
    for r in reports {
        let (s, e) = rmse_near(r, 2.0);
        println!(
            "{:<20} {:>12.4e} {:>20} {:>12.4e} {:>12.4e}",
            r.name,
            r.pixel_rmse,
            format!("{e:.4e} (s={s:.2})"),
            low_band(&r.profile),
            band_mean(&r.profile, 0.4, 0.6)
        );
    }
}

pub fn evaluate(cfg: &RunConfig, paths: &[PathBuf]) -> Result<(), CliError> {
    let spec = cfg.sampler_spec();
    let mut taken = HashSet::new();
    let mut entries = Vec::new();
    for path in paths {
        let tile = read_tile(path)?;
        entries.push((unique(stem(path), &mut taken), spec, tile));
    }
    let (w, h) = (entries[0].2.width(), entries[0].2.height());
    for baseline in &cfg.baselines {
        let name = unique(baseline.name().to_string(), &mut taken);
        let entry = match baseline {
            Baseline::WhiteNoise => (
                name,
                white_noise_spec(cfg),
                Tile::random(w, h, cfg.tile_seed)?,
            ),
            Baseline::Random => (name, spec, Tile::random(w, h, cfg.tile_seed)?),
            Baseline::SobolXor => {
                let sobol = SamplerSpec::new(SamplerKind::SobolOwenXor, cfg.spp, cfg.sampler_seed)
                    .with_pairs(cfg.pairs);
                let tile = run_optimizer(cfg, &sobol, w, h)?.tile;
                (name, sobol, tile)
            }
        };
        entries.push(entry);
    }
    let reports = evaluate_entries(cfg, cfg.family, &entries)?;

    let mut files = Outputs::new(&cfg.out);
    files.add("rmse.csv", csv(|b| write_rmse_csv(&reports, b)));
    files.add("profile.csv", csv(|b| write_profile_csv(&reports, b)));
    spectrum_files(&mut files, &reports);
    files.add("evaluate.cfg", cfg.to_text().into_bytes());
    let written = files.commit()?;
    print_table(&reports);
    report_written(&written);
    Ok(())
}

pub fn spectrum(cfg: &RunConfig, path: Option<&Path>) -> Result<(), CliError> {
    let (name, tile) = match path {
        Some(p) => (stem(p), read_tile(p)?),
        None => (
            cfg.sampler.name().to_string(),
            Tile::random(cfg.width, cfg.height, cfg.tile_seed)?,
        ),
    };
    let spec = if cfg.sampler == SamplerKind::WhiteNoise {
        white_noise_spec(cfg)
    } else {
        cfg.sampler_spec()
    };
    let reports = evaluate_entries(cfg, cfg.family, &[(name, spec, tile)])?;
    let r = &reports[0];
    let powers: Vec<f64> = r.profile.iter().map(|b| b.mean_power).collect();
    let max = powers.iter().copied().fold(f64::MIN, f64::max);
    let min = powers.iter().copied().fold(f64::MAX, f64::min);

    let mut files = Outputs::new(&cfg.out);
    files.add(
        format!("spectrum-{}.pfm", r.name),
        csv(|b| write_pfm_gray(r.spectrum.side, r.spectrum.side, &r.spectrum.power, b)),
    );
    files.add("profile.csv", csv(|b| write_profile_csv(&reports, b)));
    let written = files.commit()?;
    println!(
        "{}: low band {:.4e}, 40-60% band {:.4e}, max/min bin ratio {:.3}",
        r.name,
        low_band(&r.profile),
        band_mean(&r.profile, 0.4, 0.6),
        max / min
    );
    report_written(&written);
    Ok(())
}

pub fn pad_demo(cfg: &RunConfig, path: &Path) -> Result<(), CliError> {
    if cfg.pairs < 2 {
        return Err(CliError::Config(format!(
            "pad-demo needs pairs >= 2 to consume two dimension pairs, got {}",
            cfg.pairs
        )));
    }
    let tile = read_tile(path)?;
    let (w, h) = (tile.width(), tile.height());
    let entries = vec![
        (format!("{}-4d", stem(path)), cfg.sampler_spec(), tile),
        (
            "white-noise-4d".to_string(),
            white_noise_spec(cfg),
            Tile::random(w, h, cfg.tile_seed)?,
        ),
    ];
    let reports = evaluate_entries(cfg, Family::Product, &entries)?;

    let mut files = Outputs::new(&cfg.out);
    files.add("rmse.csv", csv(|b| write_rmse_csv(&reports, b)));
    files.add("profile.csv", csv(|b| write_profile_csv(&reports, b)));
    spectrum_files(&mut files, &reports);
    let written = files.commit()?;
    print_table(&reports);
    println!(
        "low-band ratio to white noise: {:.4}",
        low_band(&reports[0].profile) / low_band(&reports[1].profile)
    );
    report_written(&written);
    Ok(())
}

pub fn export_tile(cfg: &RunConfig, path: &Path, format: &str) -> Result<(), CliError> {
    let tile = read_tile(path)?;
    let mut files = Outputs::new(&cfg.out);
    match format {
        "pfm" => {
            let rgb: Vec<f64> = tile.shifts().iter().flat_map(|s| [s.u, s.v, 0.0]).collect();
            files.add(
                format!("{}.pfm", stem(path)),
                csv(|b| write_pfm(tile.width(), tile.height(), 3, &rgb, b)),
            );
        }
        "csv" => {
            let mut text = String::from("x,y,u,v\n");
            for (i, s) in tile.shifts().iter().enumerate() {
                let _ = writeln!(
                    text,
                    "{},{},{},{}",
                    i % tile.width(),
                    i / tile.width(),
                    s.u,
                    s.v
                );
            }
            files.add(format!("{}.csv", stem(path)), text.into_bytes());
        }
        other => return Err(CliError::Usage(format!("unknown export format `{other}`"))),
    }
    report_written(&files.commit()?);
    Ok(())
}
