//! Experiment configuration: flags over a JSON file over defaults.

use crate::error::CliError;
use fhspec::disorder::Thresholds;
use fhspec::rank1::Family;
use fhspec::toeplitz::MAX_ORDER;
use fhspec::SymbolParams;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Build,
    Spectrum,
    Momenta,
    Sweep,
    Localize,
    Freeprob,
    Rank1,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Build => "build",
            Experiment::Spectrum => "spectrum",
            Experiment::Momenta => "momenta",
            Experiment::Sweep => "sweep",
            Experiment::Localize => "localize",
            Experiment::Freeprob => "freeprob",
            Experiment::Rank1 => "rank1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Geometric,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub max: Option<f64>,
    pub points: Option<usize>,
    pub spacing: Option<Spacing>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdFile {
    pub eps_real: Option<f64>,
    pub kappa_ratio: Option<f64>,
    pub pred_tol: Option<f64>,
    pub collision_resolution: Option<f64>,
}

/// Every field optional; the same shape is used for flags and for the file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub experiment: Option<Experiment>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub n: Option<usize>,
    pub sigma_grid: Option<GridFile>,
    pub seed: Option<u64>,
    pub thresholds: Option<ThresholdFile>,
    pub trials: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub sigma: Option<f64>,
    pub bins: Option<usize>,
    pub family: Option<String>,
    pub index: Option<usize>,
    pub complex: Option<bool>,
    pub vectors: Option<bool>,
    pub image_points: Option<usize>,
}

impl PartialConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))
    }

    /// Fields of `self` win over those of `base`.
    pub fn over(self, base: PartialConfig) -> PartialConfig {
        let grid = match (self.sigma_grid, base.sigma_grid) {
            (Some(a), Some(b)) => Some(GridFile {
                max: a.max.or(b.max),
                points: a.points.or(b.points),
                spacing: a.spacing.or(b.spacing),
            }),
            (a, b) => a.or(b),
        };
        let thresholds = match (self.thresholds, base.thresholds) {
            (Some(a), Some(b)) => Some(ThresholdFile {
                eps_real: a.eps_real.or(b.eps_real),
                kappa_ratio: a.kappa_ratio.or(b.kappa_ratio),
                pred_tol: a.pred_tol.or(b.pred_tol),
                collision_resolution: a.collision_resolution.or(b.collision_resolution),
            }),
            (a, b) => a.or(b),
        };
        PartialConfig {
            experiment: self.experiment.or(base.experiment),
            alpha: self.alpha.or(base.alpha),
            beta: self.beta.or(base.beta),
            n: self.n.or(base.n),
            sigma_grid: grid,
            seed: self.seed.or(base.seed),
            thresholds,
            trials: self.trials.or(base.trials),
            output_dir: self.output_dir.or(base.output_dir),
            sigma: self.sigma.or(base.sigma),
            bins: self.bins.or(base.bins),
            family: self.family.or(base.family),
            index: self.index.or(base.index),
            complex: self.complex.or(base.complex),
            vectors: self.vectors.or(base.vectors),
            image_points: self.image_points.or(base.image_points),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaGrid {
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl SigmaGrid {
    /// Linear: `points` values from 0 to max. Geometric: 0 followed by `points`
    /// values from 1e-3 to max.
    pub fn values(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Linear => fhspec::disorder::linear_grid(self.max, self.points),
            Spacing::Geometric => fhspec::rank1::census_grid(self.max, self.points),
        }
    }
}

/// Fully resolved and validated configuration; recorded verbatim in the manifest.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    pub sigma_grid: SigmaGrid,
    pub seed: u64,
    pub thresholds: Thresholds,
    pub trials: usize,
    #[serde(skip)]
    pub output_dir: PathBuf,
    pub sigma: f64,
    pub bins: usize,
    pub family: String,
    pub index: usize,
    pub complex: bool,
    pub vectors: bool,
    pub image_points: usize,
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Validation(msg.into()))
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if !(x.is_finite() && x > 0.0) {
        return invalid(format!("{name} must be positive and finite, got {x}"));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn resolve(experiment: Experiment, p: PartialConfig) -> Result<Self, CliError> {
        if let Some(e) = p.experiment {
            if e != experiment {
                return invalid(format!("config is for experiment {}, not {}", e.name(), experiment.name()));
            }
        }
        let rank1 = experiment == Experiment::Rank1;
        let grid = p.sigma_grid.unwrap_or_default();
        let sigma_grid = SigmaGrid {
            max: grid.max.unwrap_or(if rank1 { 20.0 } else { 0.5 }),
            points: grid.points.unwrap_or(if rank1 { 64 } else { 51 }),
            spacing: grid.spacing.unwrap_or(if rank1 { Spacing::Geometric } else { Spacing::Linear }),
        };
        let th = p.thresholds.unwrap_or_default();
        let d = Thresholds::default();
        let thresholds = Thresholds {
            eps_real: th.eps_real.unwrap_or(d.eps_real),
            kappa_ratio: th.kappa_ratio.unwrap_or(d.kappa_ratio),
            pred_tol: th.pred_tol.unwrap_or(d.pred_tol),
            collision_resolution: th.collision_resolution.unwrap_or(d.collision_resolution),
        };
        let cfg = ExperimentConfig {
            experiment,
            alpha: p.alpha.unwrap_or(1.0 / 3.0),
            beta: p.beta.unwrap_or(-0.5),
            n: p.n.unwrap_or(160),
            sigma_grid,
            seed: p.seed.unwrap_or(42),
            thresholds,
            trials: p.trials.unwrap_or(50),
            output_dir: p.output_dir.unwrap_or_else(|| PathBuf::from("fhspec-out")),
            sigma: p.sigma.unwrap_or(1.0),
            bins: p.bins.unwrap_or(fhspec::freeprob::DEFAULT_BINS),
            family: p.family.unwrap_or_else(|| "jj".into()),
            index: p.index.unwrap_or(1),
            complex: p.complex.unwrap_or(false),
            vectors: p.vectors.unwrap_or(false),
            image_points: p.image_points.unwrap_or(1024),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn params(&self) -> SymbolParams {
        SymbolParams { alpha: self.alpha, beta: self.beta }
    }

    pub fn family(&self) -> Result<Family, CliError> {
        self.family.parse().map_err(|_| CliError::Validation(format!("unknown family {:?} (jj, 1k, j1)", self.family)))
    }

    fn validate(&self) -> Result<(), CliError> {
        SymbolParams::new(self.alpha, self.beta).map_err(|e| CliError::Validation(e.to_string()))?;
        if self.n < 2 || self.n > MAX_ORDER {
            return invalid(format!("n must lie in [2, {MAX_ORDER}], got {}", self.n));
        }
        match self.experiment {
            Experiment::Build | Experiment::Spectrum | Experiment::Momenta => {
                if self.image_points < 16 {
                    return invalid("image_points must be at least 16");
                }
            }
            Experiment::Sweep | Experiment::Localize => {
                self.validate_grid()?;
                let t = &self.thresholds;
                for (name, x) in [
                    ("eps_real", t.eps_real),
                    ("kappa_ratio", t.kappa_ratio),
                    ("pred_tol", t.pred_tol),
                    ("collision_resolution", t.collision_resolution),
                ] {
                    positive(name, x)?;
                }
                if self.experiment == Experiment::Localize && self.n < 16 {
                    return invalid(format!("localize needs n >= 16, got {}", self.n));
                }
            }
            Experiment::Freeprob => {
                if !(self.sigma.is_finite() && self.sigma >= 0.0) {
                    return invalid(format!("sigma must be finite and non-negative, got {}", self.sigma));
                }
                if self.trials == 0 {
                    return invalid("trials must be at least 1");
                }
                if self.bins == 0 {
                    return invalid("bins must be at least 1");
                }
            }
            Experiment::Rank1 => {
                self.validate_grid()?;
                if self.sigma_grid.spacing != Spacing::Geometric {
                    return invalid("rank1 uses a geometric sigma grid");
                }
                let family = self.family()?;
                if self.index == 0 || self.index > self.n {
                    return invalid(format!("index must lie in [1, {}], got {}", self.n, self.index));
                }
                if family == Family::Diagonal && 2 * self.index >= self.n {
                    return invalid(format!("jj family needs 2j < n, got j = {}", self.index));
                }
            }
        }
        Ok(())
    }

    fn validate_grid(&self) -> Result<(), CliError> {
        let g = self.sigma_grid;
        positive("sigma_grid.max", g.max)?;
        if g.points < 2 {
            return invalid(format!("sigma_grid.points must be at least 2, got {}", g.points));
        }
        if g.spacing == Spacing::Geometric && g.max <= 1e-3 {
            return invalid("a geometric sigma grid needs max > 1e-3");
        }
        Ok(())
    }
}
