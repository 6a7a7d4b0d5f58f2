//! Free (Haar-conjugated) and classical (permuted) models of the disordered
//! density of states, compared with the exact ensemble of T + σV.

use crate::eigen::{eig_real, eigenvalues_complex};
use crate::error::{Error, Result};
use crate::rng::{normals, substream};
use crate::spectral::Spectrum;
use crate::toeplitz::ToeplitzMatrix;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Re,
    Im,
}

impl Axis {
    pub fn of(&self, z: Complex64) -> f64 {
        match self {
            Axis::Re => z.re,
            Axis::Im => z.im,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Axis::Re => "re",
            Axis::Im => "im",
        }
    }
}

/// Normalized histogram of one marginal of a pooled eigenvalue sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DosHistogram {
    pub axis: Axis,
    pub edges: Vec<f64>,
    pub mass: Vec<f64>,
    pub sample_count: usize,
}

impl DosHistogram {
    pub fn from_samples(axis: Axis, samples: &[Complex64], edges: &[f64]) -> Result<Self> {
        if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Parameter("histogram edges must be ascending".into()));
        }
        if samples.is_empty() {
            return Err(Error::Parameter("no samples".into()));
        }
        let bins = edges.len() - 1;
        let (lo, hi) = (edges[0], edges[bins]);
        let width = (hi - lo) / bins as f64;
        let mut count = vec![0usize; bins];
        for z in samples {
            let x = axis.of(*z);
            if !(x >= lo && x <= hi) {
                return Err(Error::Domain(format!("sample {x} outside [{lo}, {hi}]")));
            }
            let mut b = (((x - lo) / width) as usize).min(bins - 1);
            while b > 0 && x < edges[b] {
                b -= 1;
            }
            while b + 1 < bins && x >= edges[b + 1] {
                b += 1;
            }
            count[b] += 1;
        }
        let total = samples.len() as f64;
        Ok(DosHistogram {
            axis,
            edges: edges.to_vec(),
            mass: count.iter().map(|&c| c as f64 / total).collect(),
            sample_count: samples.len(),
        })
    }

    /// Cumulative mass at x, uniform within each bin.
    pub fn cdf(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (b, m) in self.mass.iter().enumerate() {
            let (l, r) = (self.edges[b], self.edges[b + 1]);
            if x >= r {
                acc += m;
            } else {
                if x > l {
                    acc += m * (x - l) / (r - l);
                }
                break;
            }
        }
        acc.min(1.0)
    }
}

/// `bins` uniform bins over the pooled range of all sample sets, widened by 5% each side.
pub fn pooled_edges(axis: Axis, sets: &[&[Complex64]], bins: usize) -> Result<Vec<f64>> {
    if bins == 0 {
        return Err(Error::Parameter("need at least one bin".into()));
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for z in sets.iter().flat_map(|s| s.iter()) {
        let x = axis.of(*z);
        lo = lo.min(x);
        hi = hi.max(x);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Parameter("no finite samples".into()));
    }
    let span = if hi > lo { hi - lo } else { lo.abs().max(1.0) };
    let (lo, hi) = (lo - 0.05 * span, hi + 0.05 * span);
    Ok((0..=bins).map(|i| lo + (hi - lo) * i as f64 / bins as f64).collect())
}

/// Kolmogorov distance between the two binned CDFs.
pub fn dos_distance(h1: &DosHistogram, h2: &DosHistogram) -> Result<f64> {
    if h1.axis != h2.axis {
        return Err(Error::AxisMismatch);
    }
    let mut pts: Vec<f64> = h1.edges.iter().chain(&h2.edges).copied().collect();
    pts.sort_by(f64::total_cmp);
    Ok(pts.iter().map(|&x| (h1.cdf(x) - h2.cdf(x)).abs()).fold(0.0, f64::max).min(1.0))
}

/// Haar-distributed orthogonal matrix from the QR factors of a Gaussian matrix.
pub fn sample_haar_orthogonal<R: rand::Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_vec(n, n, normals(rng, n * n));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Pooled eigenvalues of one ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSamples {
    pub values: Vec<Complex64>,
    pub trials: usize,
    /// Trials whose eigensolve failed and were left out.
    pub failures: usize,
}

fn pool(per_trial: Vec<Option<Vec<Complex64>>>) -> EnsembleSamples {
    let trials = per_trial.len();
    let failures = per_trial.iter().filter(|t| t.is_none()).count();
    EnsembleSamples { values: per_trial.into_iter().flatten().flatten().collect(), trials, failures }
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::Parameter("trials must be at least 1".into()));
    }
    Ok(())
}

fn disorder(seed: u64, trial: usize, n: usize) -> Vec<f64> {
    normals(&mut substream(seed, "disorder", trial as u64), n)
}

/// Eigenvalues of Q^T Λ Q + σV with fresh Haar Q and V per trial.
pub fn free_approximation_samples(spec: &Spectrum, sigma: f64, trials: usize, seed: u64) -> Result<EnsembleSamples> {
    check_trials(trials)?;
    let n = spec.n;
    let out = (0..trials)
        .into_par_iter()
        .map(|t| {
            let q = sample_haar_orthogonal(n, &mut substream(seed, "haar", t as u64));
            let v = disorder(seed, t, n);
            let m = DMatrix::from_fn(n, n, |i, j| {
                let s: Complex64 = (0..n).map(|k| spec.eigenvalues[k] * (q[(k, i)] * q[(k, j)])).sum();
                if i == j { s + sigma * v[i] } else { s }
            });
            eigenvalues_complex(&m).ok()
        })
        .collect();
    Ok(pool(out))
}

/// E^{π(i)} + σv_i with a uniform permutation π and fresh V per trial.
pub fn classical_approximation_samples(spec: &Spectrum, sigma: f64, trials: usize, seed: u64) -> Result<EnsembleSamples> {
    check_trials(trials)?;
    let n = spec.n;
    let out = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut substream(seed, "permutation", t as u64));
            let v = disorder(seed, t, n);
            Some((0..n).map(|i| spec.eigenvalues[perm[i]] + sigma * v[i]).collect())
        })
        .collect();
    Ok(pool(out))
}

/// Eigenvalues of T + σV, with the same V per trial as the two models.
pub fn exact_samples(t: &ToeplitzMatrix, sigma: f64, trials: usize, seed: u64) -> Result<EnsembleSamples> {
    check_trials(trials)?;
    let n = t.n;
    let out = (0..trials)
        .into_par_iter()
        .map(|k| {
            let v = disorder(seed, k, n);
            let mut m = t.entries.clone();
            for i in 0..n {
                m[(i, i)] += sigma * v[i];
            }
            eig_real(&m).ok().map(|e| e.values)
        })
        .collect();
    Ok(pool(out))
}

fn own_histograms(samples: &EnsembleSamples, bins: usize) -> Result<(DosHistogram, DosHistogram)> {
    let re = pooled_edges(Axis::Re, &[&samples.values], bins)?;
    let im = pooled_edges(Axis::Im, &[&samples.values], bins)?;
    Ok((
        DosHistogram::from_samples(Axis::Re, &samples.values, &re)?,
        DosHistogram::from_samples(Axis::Im, &samples.values, &im)?,
    ))
}

/// (Re, Im) histograms of the free model on its own range.
pub fn free_approximation_dos(
    spec: &Spectrum,
    sigma: f64,
    trials: usize,
    seed: u64,
    bins: usize,
) -> Result<(DosHistogram, DosHistogram)> {
    own_histograms(&free_approximation_samples(spec, sigma, trials, seed)?, bins)
}

/// (Re, Im) histograms of the classical model on its own range.
pub fn classical_approximation_dos(
    spec: &Spectrum,
    sigma: f64,
    trials: usize,
    seed: u64,
    bins: usize,
) -> Result<(DosHistogram, DosHistogram)> {
    own_histograms(&classical_approximation_samples(spec, sigma, trials, seed)?, bins)
}

pub const DEFAULT_BINS: usize = 128;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxisComparison {
    pub axis: Axis,
    pub exact: DosHistogram,
    pub free: DosHistogram,
    pub classical: DosHistogram,
    pub distance_free: f64,
    pub distance_classical: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DosComparison {
    pub sigma: f64,
    pub trials: usize,
    pub seed: u64,
    pub failures: [usize; 3],
    pub re: AxisComparison,
    pub im: AxisComparison,
}

/// All three ensembles on shared bins, with Kolmogorov distances to the exact one.
pub fn compare_dos(t: &ToeplitzMatrix, spec: &Spectrum, sigma: f64, trials: usize, seed: u64, bins: usize) -> Result<DosComparison> {
    let exact = exact_samples(t, sigma, trials, seed)?;
    let free = free_approximation_samples(spec, sigma, trials, seed)?;
    let classical = classical_approximation_samples(spec, sigma, trials, seed)?;
    let axis = |axis: Axis| -> Result<AxisComparison> {
        let edges = pooled_edges(axis, &[&exact.values, &free.values, &classical.values], bins)?;
        let e = DosHistogram::from_samples(axis, &exact.values, &edges)?;
        let f = DosHistogram::from_samples(axis, &free.values, &edges)?;
        let c = DosHistogram::from_samples(axis, &classical.values, &edges)?;
        Ok(AxisComparison {
            axis,
            distance_free: dos_distance(&f, &e)?,
            distance_classical: dos_distance(&c, &e)?,
            exact: e,
            free: f,
            classical: c,
        })
    };
    Ok(DosComparison {
        sigma,
        trials,
        seed,
        failures: [exact.failures, free.failures, classical.failures],
        re: axis(Axis::Re)?,
        im: axis(Axis::Im)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn distance_to_itself_and_disjoint() {
        let a: Vec<Complex64> = (0..10).map(|i| c(i as f64 * 0.1)).collect();
        let b: Vec<Complex64> = (0..10).map(|i| c(5.0 + i as f64 * 0.1)).collect();
        let edges = pooled_edges(Axis::Re, &[&a, &b], 64).unwrap();
        let ha = DosHistogram::from_samples(Axis::Re, &a, &edges).unwrap();
        let hb = DosHistogram::from_samples(Axis::Re, &b, &edges).unwrap();
        assert_eq!(dos_distance(&ha, &ha).unwrap(), 0.0);
        assert!((dos_distance(&ha, &hb).unwrap() - 1.0).abs() < 1e-12);
        assert!((ha.mass.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let mut hi = ha.clone();
        hi.axis = Axis::Im;
        assert!(matches!(dos_distance(&ha, &hi), Err(Error::AxisMismatch)));
    }

    #[test]
    fn haar_is_orthogonal() {
        let mut rng = substream(3, "haar", 0);
        for n in [1, 2, 9, 40] {
            let q = sample_haar_orthogonal(n, &mut rng);
            let e = (q.transpose() * &q - DMatrix::identity(n, n)).abs().max();
            assert!(e < 1e-12, "n = {n}: {e}");
        }
    }

    #[test]
    fn one_by_one_is_a_fair_sign() {
        let mut rng = substream(5, "haar", 0);
        let plus = (0..4000).filter(|_| sample_haar_orthogonal(1, &mut rng)[(0, 0)] > 0.0).count();
        assert!((plus as f64 - 2000.0).abs() < 4.0 * 1000f64.sqrt());
    }
}
