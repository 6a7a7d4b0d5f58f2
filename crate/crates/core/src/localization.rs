//! Shannon entropy, inverse participation ratio and decay-profile fits of eigenvectors.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const UNIT_TOL: f64 = 1e-10;

fn check_unit(v: &[Complex64]) -> Result<()> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if v.is_empty() || (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::Normalization(norm));
    }
    Ok(())
}

/// Unit-norm copy of `v`.
pub fn normalized(v: &[Complex64]) -> Vec<Complex64> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|z| z / norm).collect()
}

/// H = -Σ |ψ_j|² log₂ |ψ_j|², in bits.
pub fn shannon_entropy(v: &[Complex64]) -> Result<f64> {
    check_unit(v)?;
    let h = -v
        .iter()
        .map(|z| z.norm_sqr())
        .filter(|&w| w > 0.0)
        .map(|w| w * w.log2())
        .sum::<f64>();
    Ok(h.max(0.0))
}

/// Σ |ψ_j|⁴.
pub fn ipr(v: &[Complex64]) -> Result<f64> {
    check_unit(v)?;
    let s = v.iter().map(|z| z.norm_sqr().powi(2)).sum::<f64>();
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecayClass {
    ExponentialBoundary,
    AlgebraicInterior,
    SuperExponentialBoundary,
    Unclassified,
}

impl DecayClass {
    pub fn name(&self) -> &'static str {
        match self {
            DecayClass::ExponentialBoundary => "exponential_boundary",
            DecayClass::AlgebraicInterior => "algebraic_interior",
            DecayClass::SuperExponentialBoundary => "super_exponential_boundary",
            DecayClass::Unclassified => "unclassified",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitRates {
    /// |ψ| ~ e^{-rate·d}
    pub exp_rate: f64,
    /// |ψ| ~ (d+1)^{-power}
    pub alg_power: f64,
    pub exp_r2: f64,
    pub alg_r2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizationProfile {
    pub entropy: f64,
    pub ipr: f64,
    pub argmax_index: usize,
    pub decay_class: DecayClass,
    pub fit_rates: FitRates,
    /// Exponential rates fitted on the near and far halves of the tail.
    pub half_rates: (f64, f64),
    /// Tail points dropped for falling below the floor.
    pub trimmed: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayConfig {
    /// Far-half rate must exceed the near-half rate by this fraction.
    pub super_margin: f64,
    pub min_points: usize,
    /// Maxima closer than this fraction of n to an end count as boundary.
    pub boundary_fraction: f64,
    /// Share of indices dropped at the far end of the tail.
    pub tail_trim: f64,
    pub floor: f64,
}

impl Default for DecayConfig {
    fn default() -> Self {
        DecayConfig { super_margin: 0.25, min_points: 8, boundary_fraction: 0.1, tail_trim: 0.05, floor: 1e-14 }
    }
}

/// Least-squares line; returns (slope, r²).
fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return (0.0, 0.0);
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    (slope, r2)
}

pub fn decay_profile(v: &[Complex64]) -> Result<LocalizationProfile> {
    decay_profile_with(v, &DecayConfig::default())
}

pub fn decay_profile_with(v: &[Complex64], cfg: &DecayConfig) -> Result<LocalizationProfile> {
    let n = v.len();
    if n < 16 {
        return Err(Error::Parameter(format!("decay profile needs n >= 16, got {n}")));
    }
    let entropy = shannon_entropy(v)?;
    let ipr = ipr(v)?;
    let a: Vec<f64> = v.iter().map(|z| z.norm()).collect();
    let m = (0..n).max_by(|&i, &j| a[i].total_cmp(&a[j])).unwrap();
    let drop = ((cfg.tail_trim * n as f64).ceil() as usize).max(1);
    let tail: Vec<f64> = if 2 * m < n {
        a[m..n - drop].to_vec()
    } else {
        a[drop..=m].iter().rev().copied().collect()
    };
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut trimmed = 0;
    for (d, &amp) in tail.iter().enumerate() {
        if amp < cfg.floor {
            trimmed += 1;
            continue;
        }
        xs.push(d as f64);
        ys.push(amp.ln());
    }
    let edge = (cfg.boundary_fraction * n as f64) as usize;
    let boundary = m < edge || m >= n - edge;
    let unclassified = |fit_rates, half_rates| LocalizationProfile {
        entropy,
        ipr,
        argmax_index: m,
        decay_class: DecayClass::Unclassified,
        fit_rates,
        half_rates,
        trimmed,
    };
    let nan = FitRates { exp_rate: f64::NAN, alg_power: f64::NAN, exp_r2: 0.0, alg_r2: 0.0 };
    if xs.len() < cfg.min_points {
        return Ok(unclassified(nan, (f64::NAN, f64::NAN)));
    }
    let (es, er2) = fit_line(&xs, &ys);
    let lx: Vec<f64> = xs.iter().map(|d| (d + 1.0).ln()).collect();
    let (as_, ar2) = fit_line(&lx, &ys);
    let fit_rates = FitRates { exp_rate: -es, alg_power: -as_, exp_r2: er2, alg_r2: ar2 };
    let half = xs.len() / 2;
    let half_rates = if half >= cfg.min_points {
        (-fit_line(&xs[..half], &ys[..half]).0, -fit_line(&xs[half..], &ys[half..]).0)
    } else {
        (f64::NAN, f64::NAN)
    };
    let decay_class = match (boundary, er2 >= ar2) {
        (true, true) => {
            let (near, far) = half_rates;
            if near > 0.0 && far >= (1.0 + cfg.super_margin) * near {
                DecayClass::SuperExponentialBoundary
            } else {
                DecayClass::ExponentialBoundary
            }
        }
        (false, false) => DecayClass::AlgebraicInterior,
        _ => return Ok(unclassified(fit_rates, half_rates)),
    };
    Ok(LocalizationProfile { entropy, ipr, argmax_index: m, decay_class, fit_rates, half_rates, trimmed })
}

/// Spearman rank correlation, ties given their mean rank.
pub fn rank_correlation(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            for &k in &idx[i..=j] {
                r[k] = 0.5 * (i + j) as f64;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let m = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / m;
    let my = ry.iter().sum::<f64>() / m;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}
