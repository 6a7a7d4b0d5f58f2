//! Experiment runners. Everything is computed first, then written in a fixed
//! order and hashed into `manifest.json`.

use crate::config::{Experiment, ExperimentConfig};
use crate::error::CliError;
use fhspec::disorder::{archetypes, compression_profile, draw_disorder, sigma_sweep_with, ClassKind, SigmaSweep};
use fhspec::export::{self, fmt};
use fhspec::freeprob::{compare_dos, AxisComparison};
use fhspec::localization::{decay_profile, normalized, LocalizationProfile};
use fhspec::rank1::runaway_census;
use fhspec::spectral::{eig_full, order_by_momentum};
use fhspec::toeplitz::build_toeplitz;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::Path;

pub const MANIFEST: &str = "manifest.json";

#[derive(Default)]
struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
    summary: Value,
}

impl Artifacts {
    fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    fn add_json(&mut self, name: &str, v: &Value) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Io(e.to_string()))?;
        s.push('\n');
        self.add(name, s.into_bytes());
        Ok(())
    }

    fn add_with<F>(&mut self, name: &str, write: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut Vec<u8>) -> fhspec::Result<()>,
    {
        let mut buf = Vec::new();
        write(&mut buf)?;
        self.add(name, buf);
        Ok(())
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Fails early when the output directory cannot be written.
pub fn prepare_output(dir: &Path) -> Result<(), CliError> {
    let bad = |e: std::io::Error| CliError::Validation(format!("output_dir {} is not writable: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(bad)?;
    let probe = dir.join(".fhspec-write-test");
    std::fs::write(&probe, b"").map_err(bad)?;
    std::fs::remove_file(&probe).map_err(bad)?;
    Ok(())
}

/// Runs the experiment and returns the manifest that was written.
pub fn run(cfg: &ExperimentConfig) -> Result<Value, CliError> {
    prepare_output(&cfg.output_dir)?;
    let art = match cfg.experiment {
        Experiment::Build => build(cfg)?,
        Experiment::Spectrum => spectrum(cfg)?,
        Experiment::Momenta => momenta(cfg)?,
        Experiment::Sweep => sweep(cfg)?,
        Experiment::Localize => localize(cfg)?,
        Experiment::Freeprob => freeprob(cfg)?,
        Experiment::Rank1 => rank1(cfg)?,
    };
    let mut entries = Vec::new();
    for (name, bytes) in &art.files {
        let path = cfg.output_dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, bytes)?;
        entries.push(json!({ "path": name, "sha256": sha256_hex(bytes), "bytes": bytes.len() }));
    }
    let manifest = json!({
        "tool": "fhspec",
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": cfg.experiment.name(),
        "seed": cfg.seed,
        "parameters": cfg,
        "files": entries,
        "summary": art.summary,
    });
    let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    std::fs::write(cfg.output_dir.join(MANIFEST), text)?;
    Ok(manifest)
}

fn build(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let t = build_toeplitz(cfg.params(), cfg.n)?;
    let mut art = Artifacts::default();
    art.add_with("matrix.csv", |w| export::write_matrix_csv(w, &t))?;
    art.add_json("matrix.json", &export::matrix_sidecar(&t))?;
    art.summary = json!({ "trace": t.diagonal_sum() });
    Ok(art)
}

fn spectrum(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let params = cfg.params();
    let t = build_toeplitz(params, cfg.n)?;
    let s = order_by_momentum(eig_full(&t.entries)?, params)?;
    let mut art = Artifacts::default();
    art.add_with("spectrum.csv", |w| export::write_spectrum_csv(w, &s))?;
    art.add_with("symbol_image.csv", |w| export::write_symbol_image_csv(w, params, cfg.image_points))?;
    if cfg.vectors {
        let mut right = Vec::new();
        let mut left = Vec::new();
        let hr = export::write_vectors_binary(&mut right, &s.right)?;
        let hl = export::write_vectors_binary(&mut left, &s.left)?;
        art.add("right_vectors.bin", right);
        art.add("left_vectors.bin", left);
        art.add_json("vectors.json", &json!({ "right_vectors.bin": hr, "left_vectors.bin": hl }))?;
    }
    let sum: fhspec::Complex64 = s.eigenvalues.iter().sum();
    art.summary = json!({
        "trace": t.diagonal_sum(),
        "eigenvalue_sum": [sum.re, sum.im],
        "kappa_max": s.kappa_max(),
        "basis_condition": s.basis_condition,
        "min_gap": s.min_gap,
    });
    Ok(art)
}

fn momenta(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let params = cfg.params();
    let n = cfg.n;
    let t = build_toeplitz(params, n)?;
    let s = order_by_momentum(eig_full(&t.entries)?, params)?;
    let p = s.momenta.as_ref().expect("ordered spectrum carries momenta");
    let im_asym = params.decay() * (n as f64).ln() / n as f64;
    let mut out = String::from("order_index,re_p,im_p,re_dp,im_p_asymptotic\n");
    for l in 0..n {
        let dp = if l + 1 < n { fmt(p[l + 1].re - p[l].re) } else { String::new() };
        let _ = writeln!(out, "{l},{},{},{dp},{}", fmt(p[l].re), fmt(p[l].im), fmt(im_asym));
    }
    let mut art = Artifacts::default();
    art.add("momenta.csv", out.into_bytes());
    let (a, b) = (n / 4, 3 * n / 4);
    let spacing = if b > a + 1 { (p[b - 1].re - p[a].re) / (b - 1 - a) as f64 } else { f64::NAN };
    art.summary = json!({ "mean_spacing_over_2pi_n": spacing / (TAU / n as f64) });
    Ok(art)
}

fn run_sweep(cfg: &ExperimentConfig) -> Result<SigmaSweep, CliError> {
    let v = draw_disorder(cfg.seed, cfg.n, cfg.complex);
    Ok(sigma_sweep_with(cfg.params(), cfg.n, v, &cfg.sigma_grid.values(), cfg.seed, cfg.thresholds)?)
}

fn label_summary(s: &SigmaSweep) -> Value {
    let a = archetypes(s);
    json!({
        "count_bulk": s.count(ClassKind::Bulk),
        "count_runaway_I": s.count(ClassKind::RunawayI),
        "count_runaway_II": s.count(ClassKind::RunawayII),
        "archetypes": a,
    })
}

fn sweep(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let s = run_sweep(cfg)?;
    let mut art = Artifacts::default();
    for k in 0..s.sigma_grid().len() {
        art.add_with(&format!("levels/level_{k:03}.csv"), |w| export::write_sweep_level_csv(w, &s, k))?;
    }
    let mut labels = String::from("order_index,kind,collision_sigma,kappa_ratio,pred_error\n");
    for (l, lab) in s.labels.iter().enumerate() {
        let kind = match lab.kind {
            ClassKind::Bulk => "bulk",
            ClassKind::RunawayI => "runaway_I",
            ClassKind::RunawayII => "runaway_II",
        };
        let sc = lab.collision_sigma.map(fmt).unwrap_or_default();
        let _ = writeln!(labels, "{l},{kind},{sc},{},{}", fmt(lab.kappa_ratio), fmt(lab.pred_error));
    }
    art.add("labels.csv", labels.into_bytes());
    let mut comp = String::from("sigma,mean_abs_im_bulk,real_spread\n");
    for (sigma, im, spread) in compression_profile(&s) {
        let _ = writeln!(comp, "{},{},{}", fmt(sigma), fmt(im), fmt(spread));
    }
    art.add("compression.csv", comp.into_bytes());
    art.add_with("report.csv", |w| export::write_report_csv(w, &s.report))?;
    art.add_json("sweep.json", &export::sweep_manifest(&s))?;
    art.summary = label_summary(&s);
    Ok(art)
}

fn profiles(s: &SigmaSweep, k: usize) -> Result<Vec<LocalizationProfile>, CliError> {
    (0..s.n).map(|l| Ok(decay_profile(&normalized(s.eigenpair(k, l).1))?)).collect()
}

fn localize(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let s = run_sweep(cfg)?;
    let last = s.sigma_grid().len() - 1;
    let initial = profiles(&s, 0)?;
    let fin = profiles(&s, last)?;
    let mut art = Artifacts::default();
    art.add_with("profiles_initial.csv", |w| export::write_profiles_csv(w, &initial))?;
    art.add_with("profiles_final.csv", |w| export::write_profiles_csv(w, &fin))?;
    let a = archetypes(&s);
    let describe = |idx: Option<usize>| {
        idx.map(|l| {
            let p = &fin[l];
            json!({
                "index": l,
                "ipr": p.ipr,
                "entropy": p.entropy,
                "argmax": p.argmax_index,
                "decay_class": p.decay_class.name(),
                "exp_rate": p.fit_rates.exp_rate,
                "alg_power": p.fit_rates.alg_power,
            })
        })
    };
    let ordering = match (a.runaway_ii, a.bulk, a.runaway_i) {
        (Some(ii), Some(b), Some(i)) => Some(fin[ii].ipr > fin[b].ipr && fin[b].ipr > fin[i].ipr),
        _ => None,
    };
    let arch = json!({
        "sigma": s.sigma_grid()[last],
        "bulk": describe(a.bulk),
        "runaway_I": describe(a.runaway_i),
        "runaway_II": describe(a.runaway_ii),
        "ipr_ordering_II_bulk_I": ordering,
    });
    art.add_json("archetypes.json", &arch)?;
    art.add_json("sweep.json", &export::sweep_manifest(&s))?;
    art.summary = label_summary(&s);
    Ok(art)
}

fn freeprob(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let t = build_toeplitz(cfg.params(), cfg.n)?;
    let spec = eig_full(&t.entries)?;
    let c = compare_dos(&t, &spec, cfg.sigma, cfg.trials, cfg.seed, cfg.bins)?;
    let mut art = Artifacts::default();
    for axis in [&c.re, &c.im] {
        let name = axis.axis.name();
        for (model, h) in [("exact", &axis.exact), ("free", &axis.free), ("classical", &axis.classical)] {
            art.add_with(&format!("hist_{name}_{model}.csv"), |w| export::write_histogram_csv(w, h))?;
        }
    }
    let dist = |a: &AxisComparison| json!({ "free": a.distance_free, "classical": a.distance_classical });
    let d = json!({
        "sigma": c.sigma,
        "trials": c.trials,
        "failures": { "exact": c.failures[0], "free": c.failures[1], "classical": c.failures[2] },
        "re": dist(&c.re),
        "im": dist(&c.im),
    });
    art.add_json("distances.json", &d)?;
    art.summary = d;
    Ok(art)
}

fn rank1(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let family = cfg.family()?;
    let c = runaway_census(cfg.params(), cfg.n, family, cfg.index, cfg.sigma_grid.max, cfg.sigma_grid.points)?;
    let mut art = Artifacts::default();
    let census = export::census_json(&c);
    art.add_json("census.json", &census)?;
    art.summary = json!({
        "count_type_II": c.count_type_ii,
        "count_inward": c.count_inward,
        "count_outward": c.count_outward,
        "winding_of_E1": c.winding_of_e1,
    });
    Ok(art)
}
