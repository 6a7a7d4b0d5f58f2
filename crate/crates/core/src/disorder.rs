//! σ-sweeps of T + σV and the bulk / runaway classification.

use crate::error::{Error, Result};
use crate::perturbation::{perturbed_matrix, report, DiagonalPerturbation, PerturbationReport};
use crate::rng::substream;
use crate::spectral::{eig_full, eig_full_complex, match_step, order_by_momentum, solve_and_track, Spectrum, TrajectorySet};
use crate::symbol::SymbolParams;
use crate::toeplitz::{build_toeplitz, ToeplitzMatrix};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// |Im E| below this fraction of the diameter counts as real.
    pub eps_real: f64,
    /// max κ over the sweep against the median κ at σ = 0.
    pub kappa_ratio: f64,
    /// Bulk prediction tolerance as a fraction of the diameter.
    pub pred_tol: f64,
    /// Width in σ to which collisions are bisected.
    pub collision_resolution: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { eps_real: 1e-6, kappa_ratio: 10.0, pred_tol: 0.05, collision_resolution: 1e-4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassKind {
    Bulk,
    RunawayI,
    RunawayII,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassLabel {
    pub kind: ClassKind,
    pub collision_sigma: Option<f64>,
    /// max_σ κ / median κ(σ = 0).
    pub kappa_ratio: f64,
    /// |E(σ_max) - (E₀ + σE₁ + σ²E₂)| in units of the diameter.
    pub pred_error: f64,
}

#[derive(Debug, Clone)]
pub struct SigmaSweep {
    pub params: SymbolParams,
    pub n: usize,
    pub seed: u64,
    pub v: DiagonalPerturbation,
    /// Momentum-ordered spectrum at σ = 0; trajectory ℓ starts at its ℓ-th eigenvalue.
    pub base: Spectrum,
    /// Decompositions at each grid point (the first is `base`).
    pub spectra: Vec<Spectrum>,
    pub trajectories: TrajectorySet,
    /// Second-order predictions evaluated at the largest σ.
    pub report: PerturbationReport,
    pub diameter: f64,
    pub thresholds: Thresholds,
    pub labels: Vec<ClassLabel>,
}

impl SigmaSweep {
    pub fn sigma_grid(&self) -> &[f64] {
        &self.trajectories.sigma_grid
    }

    /// Eigenpair of trajectory ℓ at grid point k.
    pub fn eigenpair(&self, k: usize, ell: usize) -> (Complex64, &[Complex64], &[Complex64]) {
        let s = &self.spectra[k];
        let i = self.trajectories.index[k][ell];
        (s.eigenvalues[i], &s.right[i], &s.left[i])
    }

    pub fn count(&self, kind: ClassKind) -> usize {
        self.labels.iter().filter(|l| l.kind == kind).count()
    }

    pub fn indices(&self, kind: ClassKind) -> Vec<usize> {
        (0..self.n).filter(|&l| self.labels[l].kind == kind).collect()
    }
}

/// V drawn from the "disorder" substream of `seed`.
pub fn draw_disorder(seed: u64, n: usize, complex: bool) -> DiagonalPerturbation {
    let mut rng = substream(seed, "disorder", 0);
    if complex {
        DiagonalPerturbation::complex_normal(&mut rng, n)
    } else {
        DiagonalPerturbation::standard_normal(&mut rng, n)
    }
}

/// Linear grid 0, σ_max/(points-1), …, σ_max.
pub fn linear_grid(sigma_max: f64, points: usize) -> Vec<f64> {
    if points <= 1 {
        return vec![0.0];
    }
    (0..points).map(|k| sigma_max * k as f64 / (points - 1) as f64).collect()
}

fn solver<'a>(t: &'a ToeplitzMatrix, v: &'a DiagonalPerturbation) -> impl Fn(f64) -> Result<Spectrum> + Sync + 'a {
    let real = v.real_part();
    move |s: f64| match &real {
        Some(r) => eig_full(&perturbed_matrix(&t.entries, r, s)),
        None => {
            let mut m: DMatrix<Complex64> = t.entries.map(|x| Complex64::new(x, 0.0));
            for (i, z) in v.v.iter().enumerate() {
                m[(i, i)] += s * z;
            }
            eig_full_complex(&m)
        }
    }
}

/// Decompose T + σV on every grid point, track, and classify with default thresholds.
pub fn sigma_sweep(
    params: SymbolParams,
    n: usize,
    v: DiagonalPerturbation,
    sigma_grid: &[f64],
    seed: u64,
) -> Result<SigmaSweep> {
    sigma_sweep_with(params, n, v, sigma_grid, seed, Thresholds::default())
}

pub fn sigma_sweep_with(
    params: SymbolParams,
    n: usize,
    v: DiagonalPerturbation,
    sigma_grid: &[f64],
    seed: u64,
    thresholds: Thresholds,
) -> Result<SigmaSweep> {
    if sigma_grid.first() != Some(&0.0) {
        return Err(Error::Parameter("sigma grid must start at 0".into()));
    }
    if sigma_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Parameter("sigma grid must be strictly ascending".into()));
    }
    if v.len() != n {
        return Err(Error::Dimension { expected: n, got: v.len() });
    }
    let t = build_toeplitz(params, n)?;
    let base = order_by_momentum(eig_full(&t.entries)?, params)?;
    let (spectra, trajectories) = solve_and_track(&base, sigma_grid, solver(&t, &v))?;
    let sigma_max = *sigma_grid.last().unwrap();
    let report = report(&base, &v, sigma_max)?;
    let diameter = base.diameter();
    let mut sweep = SigmaSweep {
        params,
        n,
        seed,
        v,
        base,
        spectra,
        trajectories,
        report,
        diameter,
        thresholds,
        labels: Vec::new(),
    };
    sweep.labels = classify_eigenpairs(&sweep, &thresholds)?;
    Ok(sweep)
}

/// Trajectory whose σ = 0 value is closest to the conjugate of E^ℓ(0).
fn partner(values: &[Complex64], ell: usize) -> usize {
    let target = values[ell].conj();
    (0..values.len())
        .filter(|&m| m != ell)
        .min_by(|&a, &b| (values[a] - target).norm().total_cmp(&(values[b] - target).norm()))
        .unwrap_or(ell)
}

/// First grid index from which the path stays real, if it ends real.
fn real_from(path: &[Complex64], eps: f64) -> Option<usize> {
    if path.last()?.im.abs() > eps {
        return None;
    }
    let mut k = path.len() - 1;
    while k > 0 && path[k - 1].im.abs() <= eps {
        k -= 1;
    }
    Some(k)
}

/// Labels from a completed sweep.
pub fn classify_eigenpairs(sweep: &SigmaSweep, th: &Thresholds) -> Result<Vec<ClassLabel>> {
    let n = sweep.n;
    let tr = &sweep.trajectories;
    let last = tr.sigma_grid.len() - 1;
    let eps = th.eps_real * sweep.diameter;
    let e0 = &tr.values[0];
    let mut k0 = tr.kappa[0].clone();
    k0.sort_by(f64::total_cmp);
    let median = k0[n / 2];

    let mut collision: Vec<Option<f64>> = vec![None; n];
    let solve = solver_for(sweep)?;
    for l in 0..n {
        if collision[l].is_some() || e0[l].im.abs() <= eps {
            continue;
        }
        let m = partner(e0, l);
        let (Some(a), Some(b)) = (real_from(&tr.path(l), eps), real_from(&tr.path(m), eps)) else {
            continue;
        };
        let k = a.max(b);
        if k == 0 {
            continue;
        }
        let s = bisect_collision(sweep, &solve, k - 1, [l, m], eps, th.collision_resolution)?;
        collision[l] = Some(s);
        collision[m] = Some(s);
    }

    Ok((0..n)
        .map(|l| {
            let kmax = tr.kappa_path(l).into_iter().fold(0.0, f64::max);
            let kappa_ratio = kmax / median;
            let pred_error = (tr.values[last][l] - sweep.report.predicted[l]).norm() / sweep.diameter;
            let kind = if collision[l].is_some() {
                ClassKind::RunawayI
            } else if kappa_ratio >= th.kappa_ratio {
                ClassKind::RunawayII
            } else {
                ClassKind::Bulk
            };
            ClassLabel { kind, collision_sigma: collision[l], kappa_ratio, pred_error }
        })
        .collect())
}

fn solver_for(sweep: &SigmaSweep) -> Result<impl Fn(f64) -> Result<Spectrum> + '_> {
    let t = build_toeplitz(sweep.params, sweep.n)?;
    Ok(move |s: f64| solver(&t, &sweep.v)(s))
}

/// Narrow [σ_k, σ_{k+1}] around the point where the pair becomes real.
fn bisect_collision<F>(sweep: &SigmaSweep, solve: &F, k: usize, pair: [usize; 2], eps: f64, width: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<Spectrum>,
{
    let tr = &sweep.trajectories;
    let mut lo = tr.sigma_grid[k];
    let mut hi = tr.sigma_grid[k + 1];
    let s0 = &sweep.spectra[k];
    let mut values: Vec<Complex64> = tr.values[k].clone();
    let mut vectors: Vec<Vec<Complex64>> = tr.index[k].iter().map(|&i| s0.right[i].clone()).collect();
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        let spec = solve(mid)?;
        let refs: Vec<&[Complex64]> = vectors.iter().map(|v| v.as_slice()).collect();
        let m = match_step(&values, &refs, &spec).unwrap_or_else(|| nearest(&values, &spec));
        if pair.iter().all(|&l| spec.eigenvalues[m[l]].im.abs() <= eps) {
            hi = mid;
        } else {
            lo = mid;
            values = m.iter().map(|&i| spec.eigenvalues[i]).collect();
            vectors = m.iter().map(|&i| spec.right[i].clone()).collect();
        }
    }
    Ok(0.5 * (lo + hi))
}

fn nearest(values: &[Complex64], spec: &Spectrum) -> Vec<usize> {
    values
        .iter()
        .map(|v| {
            (0..spec.n)
                .min_by(|&a, &b| (spec.eigenvalues[a] - v).norm().total_cmp(&(spec.eigenvalues[b] - v).norm()))
                .unwrap()
        })
        .collect()
}

/// One representative trajectory per class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Archetypes {
    /// Bulk label with the median κ ratio.
    pub bulk: Option<usize>,
    /// Earliest collision; ties go to the larger Im E at σ = 0.
    pub runaway_i: Option<usize>,
    /// Largest κ ratio.
    pub runaway_ii: Option<usize>,
}

pub fn archetypes(sweep: &SigmaSweep) -> Archetypes {
    let labels = &sweep.labels;
    let e0 = &sweep.trajectories.values[0];
    let mut bulk = sweep.indices(ClassKind::Bulk);
    bulk.sort_by(|&a, &b| labels[a].kappa_ratio.total_cmp(&labels[b].kappa_ratio));
    let runaway_i = sweep.indices(ClassKind::RunawayI).into_iter().min_by(|&a, &b| {
        let (sa, sb) = (labels[a].collision_sigma.unwrap(), labels[b].collision_sigma.unwrap());
        sa.total_cmp(&sb).then(e0[b].im.total_cmp(&e0[a].im))
    });
    let runaway_ii = sweep
        .indices(ClassKind::RunawayII)
        .into_iter()
        .max_by(|&a, &b| labels[a].kappa_ratio.total_cmp(&labels[b].kappa_ratio));
    Archetypes { bulk: bulk.get(bulk.len() / 2).copied(), runaway_i, runaway_ii }
}

/// Per grid point: mean |Im E| over trajectories labeled Bulk, and max Re E - min Re E.
pub fn compression_profile(sweep: &SigmaSweep) -> Vec<(f64, f64, f64)> {
    let bulk = sweep.indices(ClassKind::Bulk);
    let tr = &sweep.trajectories;
    tr.sigma_grid
        .iter()
        .zip(&tr.values)
        .map(|(&s, row)| {
            let mean_im = if bulk.is_empty() {
                0.0
            } else {
                bulk.iter().map(|&l| row[l].im.abs()).sum::<f64>() / bulk.len() as f64
            };
            let (lo, hi) = row.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), z| (a.min(z.re), b.max(z.re)));
            (s, mean_im, hi - lo)
        })
        .collect()
}

/// Label counts [Bulk, RunawayI, RunawayII] for independent draws of V.
pub fn label_counts_over_seeds(
    params: SymbolParams,
    n: usize,
    sigma_grid: &[f64],
    seeds: &[u64],
    complex: bool,
) -> Result<Vec<(u64, [usize; 3])>> {
    seeds
        .iter()
        .map(|&seed| {
            let sweep = sigma_sweep(params, n, draw_disorder(seed, n, complex), sigma_grid, seed)?;
            Ok((
                seed,
                [sweep.count(ClassKind::Bulk), sweep.count(ClassKind::RunawayI), sweep.count(ClassKind::RunawayII)],
            ))
        })
        .collect()
}
