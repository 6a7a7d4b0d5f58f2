//! `fhspec`: runs the named experiments and writes their data with a hashed manifest.

mod config;
mod error;
mod run;

use clap::{Args, Parser, Subcommand};
use config::{Experiment, ExperimentConfig, GridFile, PartialConfig, Spacing, ThresholdFile};
use error::CliError;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "fhspec", version, about = "Fisher-Hartwig Toeplitz spectra and disorder experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dense matrix as CSV plus a JSON sidecar.
    Build(Common),
    /// Momentum-ordered spectrum and the image of the symbol.
    Spectrum(SpectrumArgs),
    /// Complex momenta and their spacing.
    Momenta(Common),
    /// σ-sweep of T + σV with bulk / runaway labels.
    Sweep(SweepArgs),
    /// Entropy, IPR and decay classes before and after a sweep.
    Localize(SweepArgs),
    /// Exact, free and classical densities of states.
    Freeprob(FreeArgs),
    /// Rank-1 runaway census.
    Rank1(Rank1Args),
}

#[derive(Args)]
struct Common {
    /// JSON config; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short = 'o')]
    output_dir: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    common: Common,
    /// Also write right and left eigenvectors as binary.
    #[arg(long)]
    vectors: bool,
    #[arg(long)]
    image_points: Option<usize>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    sigma_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long, value_enum)]
    spacing: Option<Spacing>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    grid: GridArgs,
    /// Complex V with E(v²) = 0.
    #[arg(long)]
    complex: bool,
    #[arg(long)]
    eps_real: Option<f64>,
    #[arg(long)]
    kappa_ratio: Option<f64>,
    #[arg(long)]
    pred_tol: Option<f64>,
}

#[derive(Args)]
struct FreeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    bins: Option<usize>,
}

#[derive(Args)]
struct Rank1Args {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    grid: GridArgs,
    /// jj, 1k or j1.
    #[arg(long)]
    family: Option<String>,
    /// 1-based j or k.
    #[arg(long)]
    index: Option<usize>,
}

impl Common {
    fn partial(&self) -> PartialConfig {
        PartialConfig {
            alpha: self.alpha,
            beta: self.beta,
            n: self.n,
            seed: self.seed,
            output_dir: self.output_dir.clone(),
            ..Default::default()
        }
    }
}

impl GridArgs {
    fn file(&self) -> Option<GridFile> {
        Some(GridFile { max: self.sigma_max, points: self.points, spacing: self.spacing })
    }
}

fn flag(b: bool) -> Option<bool> {
    b.then_some(true)
}

fn sweep_flags(e: Experiment, a: SweepArgs) -> (Experiment, Common, PartialConfig) {
    let th = ThresholdFile { eps_real: a.eps_real, kappa_ratio: a.kappa_ratio, pred_tol: a.pred_tol, collision_resolution: None };
    let flags = PartialConfig { sigma_grid: a.grid.file(), thresholds: Some(th), complex: flag(a.complex), ..Default::default() };
    (e, a.common, flags)
}

fn resolve(command: Command) -> Result<ExperimentConfig, CliError> {
    let (experiment, common, flags) = match command {
        Command::Build(c) => (Experiment::Build, c, PartialConfig::default()),
        Command::Momenta(c) => (Experiment::Momenta, c, PartialConfig::default()),
        Command::Spectrum(a) => (
            Experiment::Spectrum,
            a.common,
            PartialConfig { vectors: flag(a.vectors), image_points: a.image_points, ..Default::default() },
        ),
        Command::Sweep(a) => sweep_flags(Experiment::Sweep, a),
        Command::Localize(a) => sweep_flags(Experiment::Localize, a),
        Command::Freeprob(a) => (
            Experiment::Freeprob,
            a.common,
            PartialConfig { sigma: a.sigma, trials: a.trials, bins: a.bins, ..Default::default() },
        ),
        Command::Rank1(a) => (
            Experiment::Rank1,
            a.common,
            PartialConfig { sigma_grid: a.grid.file(), family: a.family, index: a.index, ..Default::default() },
        ),
    };
    let file = match &common.config {
        Some(path) => PartialConfig::from_file(path)?,
        None => PartialConfig::default(),
    };
    let merged = flags.over(common.partial()).over(file);
    ExperimentConfig::resolve(experiment, merged)
}

fn set_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("FHSPEC_THREADS") else {
        return Ok(());
    };
    let k: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&k| k > 0)
        .ok_or_else(|| CliError::Validation(format!("FHSPEC_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(k)
        .build_global()
        .map_err(|e| CliError::Validation(format!("cannot size the thread pool: {e}")))
}

fn fail(e: &CliError) -> ! {
    let line = serde_json::json!({ "error": e.kind(), "message": e.to_string().replace('\n', " ") });
    eprintln!("{line}");
    std::process::exit(e.exit_code());
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            fail(&CliError::Validation(first.trim_start_matches("error: ").to_string()));
        }
    };
    let result = set_threads().and_then(|_| resolve(cli.command)).and_then(|cfg| run::run(&cfg).map(|m| (cfg, m)));
    match result {
        Ok((cfg, m)) => {
            let files = m["files"].as_array().map_or(0, |f| f.len());
            println!("{}: wrote {files} files and {} to {}", cfg.experiment.name(), run::MANIFEST, cfg.output_dir.display());
        }
        Err(e) => fail(&e),
    }
}
