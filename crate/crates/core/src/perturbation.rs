//! Non-Hermitian perturbation theory for T + σV with diagonal V.

use crate::error::{Error, Result};
use crate::rng::normals;
use crate::spectral::Spectrum;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// V = diag(v). `variance` is E(v²) of the law v was drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalPerturbation {
    pub v: Vec<Complex64>,
    pub variance: Complex64,
}

impl DiagonalPerturbation {
    pub fn real(v: Vec<f64>) -> Self {
        let n = v.len().max(1) as f64;
        let variance = v.iter().map(|x| x * x).sum::<f64>() / n;
        DiagonalPerturbation {
            v: v.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
            variance: Complex64::new(variance, 0.0),
        }
    }

    /// Independent standard normals, E(v²) = 1.
    pub fn standard_normal<R: rand::Rng>(rng: &mut R, n: usize) -> Self {
        let mut p = Self::real(normals(rng, n));
        p.variance = Complex64::new(1.0, 0.0);
        p
    }

    /// Independent standard complex normals, E(|v|²) = 1 and E(v²) = 0.
    pub fn complex_normal<R: rand::Rng>(rng: &mut R, n: usize) -> Self {
        let x = normals(rng, 2 * n);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DiagonalPerturbation {
            v: (0..n).map(|i| Complex64::new(x[2 * i] * s, x[2 * i + 1] * s)).collect(),
            variance: Complex64::new(0.0, 0.0),
        }
    }

    /// The indicator of the diagonal entry `j` (0-based), i.e. A_jj.
    pub fn indicator(n: usize, j: usize) -> Self {
        let mut v = vec![0.0; n];
        v[j] = 1.0;
        Self::real(v)
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.v.iter().all(|z| z.im == 0.0)
    }

    /// max |v_i|, the spectral norm of V.
    pub fn norm(&self) -> f64 {
        self.v.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn real_part(&self) -> Option<Vec<f64>> {
        self.is_real().then(|| self.v.iter().map(|z| z.re).collect())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub sigma: f64,
    pub e0: Vec<Complex64>,
    pub e1: Vec<Complex64>,
    pub e2: Vec<Complex64>,
    pub predicted: Vec<Complex64>,
    pub expected_e2: Vec<Complex64>,
    pub predicted_kappa: Vec<f64>,
}

fn check_dim(spec: &Spectrum, v: &DiagonalPerturbation) -> Result<()> {
    if v.len() != spec.n {
        return Err(Error::Dimension { expected: spec.n, got: v.len() });
    }
    Ok(())
}

/// Neumaier-compensated complex sum.
fn ksum<I: IntoIterator<Item = Complex64>>(it: I) -> Complex64 {
    let (mut s, mut c) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for x in it {
        let t = s + x;
        let fix = |s: f64, x: f64, t: f64| if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
        c += Complex64::new(fix(s.re, x.re, t.re), fix(s.im, x.im, t.im));
        s = t;
    }
    s + c
}

/// M[l][j] = ⟨ψ̃^l|V|ψ^j⟩.
pub fn matrix_elements(spec: &Spectrum, v: &DiagonalPerturbation) -> Result<Vec<Vec<Complex64>>> {
    check_dim(spec, v)?;
    let n = spec.n;
    Ok((0..n)
        .into_par_iter()
        .map(|l| {
            let lv: Vec<Complex64> = (0..n).map(|i| spec.left[l][i] * v.v[i]).collect();
            (0..n).map(|j| ksum((0..n).map(|i| lv[i] * spec.right[j][i]))).collect()
        })
        .collect())
}

/// E₁^ℓ = ⟨ψ̃^ℓ|V|ψ^ℓ⟩.
pub fn first_order(spec: &Spectrum, v: &DiagonalPerturbation) -> Result<Vec<Complex64>> {
    check_dim(spec, v)?;
    Ok((0..spec.n)
        .map(|l| ksum((0..spec.n).map(|i| v.v[i] * spec.left[l][i] * spec.right[l][i])))
        .collect())
}

fn gap_floor(spec: &Spectrum) -> f64 {
    1e-12 * spec.matrix_norm.max(f64::MIN_POSITIVE)
}

fn check_gaps(spec: &Spectrum) -> Result<()> {
    let floor = gap_floor(spec);
    for l in 0..spec.n {
        for j in l + 1..spec.n {
            if (spec.eigenvalues[l] - spec.eigenvalues[j]).norm() < floor {
                return Err(Error::NearDegenerate(l, j));
            }
        }
    }
    Ok(())
}

/// E₂^ℓ = Σ_{j≠ℓ} M[ℓ][j] M[j][ℓ] / (E^ℓ - E^j).
pub fn second_order(spec: &Spectrum, v: &DiagonalPerturbation) -> Result<Vec<Complex64>> {
    check_gaps(spec)?;
    let m = matrix_elements(spec, v)?;
    Ok(second_order_from(spec, &m))
}

fn second_order_from(spec: &Spectrum, m: &[Vec<Complex64>]) -> Vec<Complex64> {
    let e = &spec.eigenvalues;
    (0..spec.n)
        .map(|l| ksum((0..spec.n).filter(|&j| j != l).map(|j| m[l][j] * m[j][l] / (e[l] - e[j]))))
        .collect()
}

/// Each term M[ℓ][j] M[j][ℓ] / (E^ℓ - E^j) of the second-order sum for one ℓ.
pub fn second_order_terms(spec: &Spectrum, v: &DiagonalPerturbation, ell: usize) -> Result<Vec<Complex64>> {
    check_gaps(spec)?;
    let m = matrix_elements(spec, v)?;
    let e = &spec.eigenvalues;
    Ok((0..spec.n)
        .map(|j| if j == ell { Complex64::new(0.0, 0.0) } else { m[ell][j] * m[j][ell] / (e[ell] - e[j]) })
        .collect())
}

/// E(E₂^ℓ) = (E(v²)/n) Σ_{j≠ℓ} 1/(E^ℓ - E^j), the value for biorthogonal
/// eigenvectors of the pure Toeplitz matrix (each ψ̃^ℓ_m ψ^ℓ_m ≈ 1/n).
pub fn expected_second_order(spec: &Spectrum, variance: f64) -> Vec<Complex64> {
    expected_second_order_complex(spec, Complex64::new(variance, 0.0))
}

pub fn expected_second_order_complex(spec: &Spectrum, variance: Complex64) -> Vec<Complex64> {
    let e = &spec.eigenvalues;
    let n = spec.n as f64;
    (0..spec.n)
        .map(|l| variance / n * ksum((0..spec.n).filter(|&j| j != l).map(|j| 1.0 / (e[l] - e[j]))))
        .collect()
}

/// The pair term of the expected second-order shift between E^ℓ and its conjugate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Attraction {
    pub partner: usize,
    /// -i E(v²) / (2n Im E^ℓ).
    pub closed_form: Complex64,
    /// -i n E(v²) / (2 Im E^ℓ), the same term with the unnormalized left vectors.
    pub closed_form_unnormalized: Complex64,
    /// E(v²) Σ_m |ψ^ℓ_m|² |ψ̃^ℓ_m|² / (E^ℓ - conj E^ℓ) from the exact vectors.
    pub exact: Complex64,
}

/// Attraction of E^ℓ toward its conjugate partner.
pub fn conjugate_attraction(spec: &Spectrum, ell: usize, variance: f64) -> Result<Attraction> {
    let e = spec.eigenvalues[ell];
    let scale = 1.0 + e.norm();
    if e.im.abs() <= 1e-12 * scale {
        return Err(Error::NoConjugate(ell));
    }
    let partner = (0..spec.n)
        .filter(|&j| j != ell)
        .min_by(|&a, &b| {
            (spec.eigenvalues[a] - e.conj()).norm().total_cmp(&(spec.eigenvalues[b] - e.conj()).norm())
        })
        .ok_or(Error::NoConjugate(ell))?;
    if (spec.eigenvalues[partner] - e.conj()).norm() > 1e-8 * scale {
        return Err(Error::NoConjugate(ell));
    }
    let n = spec.n as f64;
    let closed_form = Complex64::new(0.0, -1.0) * variance / (2.0 * n * e.im);
    let closed_form_unnormalized = Complex64::new(0.0, -1.0) * n * variance / (2.0 * e.im);
    let weight = ksum((0..spec.n).map(|m| {
        spec.left[ell][m] * spec.right[partner][m] * spec.left[partner][m] * spec.right[ell][m]
    }));
    let exact = weight * variance / (e - spec.eigenvalues[partner]);
    Ok(Attraction { partner, closed_form, closed_form_unnormalized, exact })
}

/// First-order perturbed eigenvectors and the condition numbers they predict.
#[derive(Debug, Clone)]
pub struct PerturbedVectors {
    pub right: Vec<Vec<Complex64>>,
    pub left: Vec<Vec<Complex64>>,
    pub predicted_kappa: Vec<f64>,
    /// σ‖V‖ exceeded the smallest eigenvalue gap.
    pub outside_validity: bool,
}

/// ψ^ℓ + σ Σ_{j≠ℓ} M[j][ℓ]/(E^ℓ - E^j) ψ^j and the matching left vector,
/// renormalized so that ‖ψ‖ = 1 and ⟨ψ̃|ψ⟩ = 1; κ is then ‖ψ̃‖.
pub fn first_order_eigvec(spec: &Spectrum, v: &DiagonalPerturbation, sigma: f64) -> Result<PerturbedVectors> {
    check_gaps(spec)?;
    let m = matrix_elements(spec, v)?;
    let n = spec.n;
    let e = &spec.eigenvalues;
    let outside_validity = sigma * v.norm() > spec.min_gap;
    let pairs: Vec<(Vec<Complex64>, Vec<Complex64>, f64)> = (0..n)
        .into_par_iter()
        .map(|l| {
            let mut r = spec.right[l].clone();
            let mut w = spec.left[l].clone();
            for j in 0..n {
                if j == l {
                    continue;
                }
                let d = e[l] - e[j];
                let cr = sigma * m[j][l] / d;
                let cl = sigma * m[l][j] / d;
                for i in 0..n {
                    r[i] += cr * spec.right[j][i];
                    w[i] += cl * spec.left[j][i];
                }
            }
            let rn = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            r.iter_mut().for_each(|z| *z /= rn);
            let pair: Complex64 = w.iter().zip(&r).map(|(a, b)| a * b).sum();
            w.iter_mut().for_each(|z| *z /= pair);
            let kappa = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            (r, w, kappa)
        })
        .collect();
    let mut right = Vec::with_capacity(n);
    let mut left = Vec::with_capacity(n);
    let mut predicted_kappa = Vec::with_capacity(n);
    for (r, w, k) in pairs {
        right.push(r);
        left.push(w);
        predicted_kappa.push(k);
    }
    Ok(PerturbedVectors { right, left, predicted_kappa, outside_validity })
}

/// Everything above for one (σ, V).
pub fn report(spec: &Spectrum, v: &DiagonalPerturbation, sigma: f64) -> Result<PerturbationReport> {
    check_gaps(spec)?;
    let m = matrix_elements(spec, v)?;
    let e1: Vec<Complex64> = (0..spec.n).map(|l| m[l][l]).collect();
    let e2 = second_order_from(spec, &m);
    let predicted = (0..spec.n).map(|l| spec.eigenvalues[l] + sigma * e1[l] + sigma * sigma * e2[l]).collect();
    let expected_e2 = expected_second_order_complex(spec, v.variance);
    let predicted_kappa = first_order_eigvec(spec, v, sigma)?.predicted_kappa;
    Ok(PerturbationReport {
        sigma,
        e0: spec.eigenvalues.clone(),
        e1,
        e2,
        predicted,
        expected_e2,
        predicted_kappa,
    })
}

/// T + σ diag(v) for real v.
pub fn perturbed_matrix(t: &nalgebra::DMatrix<f64>, v: &[f64], sigma: f64) -> nalgebra::DMatrix<f64> {
    let mut m = t.clone();
    for (i, x) in v.iter().enumerate() {
        m[(i, i)] += sigma * x;
    }
    m
}

/// Indices whose κ is below `factor` × the median κ.
pub fn bulk_indices(spec: &Spectrum, factor: f64) -> Vec<usize> {
    let mut k = spec.kappa.clone();
    k.sort_by(f64::total_cmp);
    let median = k[k.len() / 2];
    (0..spec.n).filter(|&l| spec.kappa[l] < factor * median).collect()
}
