//! The Fisher-Hartwig symbol a(e^{-ip}) = (2 - 2cos p)^α e^{iβ(π - p)}, its
//! Fourier coefficients, and the large-n eigenpair formulas.

use crate::error::{Error, Result};
use crate::special::{gamma_pole, ln_gamma_signed};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Zero exponent α at z = 1 and jump exponent β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolParams {
    pub alpha: f64,
    pub beta: f64,
}

impl SymbolParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let p = SymbolParams { alpha, beta };
        p.validate()?;
        Ok(p)
    }

    /// α > -1/2. Integer α ± β are allowed here; they only break the
    /// determinant formula, which checks for them itself.
    pub fn validate(&self) -> Result<()> {
        let SymbolParams { alpha, beta } = *self;
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::Parameter("alpha and beta must be finite".into()));
        }
        if alpha <= -0.5 {
            return Err(Error::Parameter(format!("alpha = {alpha} must exceed -1/2")));
        }
        Ok(())
    }

    /// α = 1/3, β = -1/2, the default working example.
    pub fn working() -> Self {
        SymbolParams { alpha: 1.0 / 3.0, beta: -0.5 }
    }

    /// Decay exponent 2α + 1 of the Fourier tail and of Im p.
    pub fn decay(&self) -> f64 {
        2.0 * self.alpha + 1.0
    }
}

/// A complex momentum, Re p in [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Momentum {
    pub p: Complex64,
}

fn reduce(p: Complex64) -> Complex64 {
    Complex64::new(p.re.rem_euclid(TAU), p.im)
}

/// a(e^{-ip}) on the strip 0 <= Re p < 2π.
pub fn eval_symbol(params: SymbolParams, p: Complex64) -> Result<Complex64> {
    let p = reduce(p);
    let phase = (Complex64::i() * params.beta * (PI - p)).exp();
    if params.alpha == 0.0 {
        return Ok(phase);
    }
    let s = 2.0 * (p / 2.0).sin();
    if s.norm() == 0.0 {
        if params.alpha < 0.0 {
            return Err(Error::SingularPoint { p: p.re });
        }
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok((2.0 * params.alpha * s.ln()).exp() * phase)
}

/// da/dp = (α cot(p/2) - iβ)·a.
pub fn symbol_derivative(params: SymbolParams, p: Complex64) -> Result<Complex64> {
    let p = reduce(p);
    let a = eval_symbol(params, p)?;
    let mut factor = Complex64::new(0.0, -params.beta);
    if params.alpha != 0.0 {
        let half = p / 2.0;
        if half.sin().norm() < 1e-8 {
            return Err(Error::SingularPoint { p: p.re });
        }
        factor += params.alpha * half.cos() / half.sin();
    }
    Ok(factor * a)
}

/// t_r = (-1)^r Γ(2α+1) / [Γ(α+β+1-r) Γ(α-β+1+r)], zero at the poles of the denominator.
pub fn fourier_coefficient(params: SymbolParams, r: i64) -> f64 {
    let SymbolParams { alpha, beta } = params;
    let x1 = alpha + beta + 1.0 - r as f64;
    let x2 = alpha - beta + 1.0 + r as f64;
    if gamma_pole(x1) || gamma_pole(x2) {
        return 0.0;
    }
    let Some((ln_num, s_num)) = ln_gamma_signed(2.0 * alpha + 1.0) else {
        return 0.0;
    };
    let (l1, s1) = ln_gamma_signed(x1).expect("pole excluded");
    let (l2, s2) = ln_gamma_signed(x2).expect("pole excluded");
    let sign = if r.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * s_num * s1 * s2 * (ln_num - l1 - l2).exp()
}

/// ν of the symbol about `point`: the winding of a(z) - point as z goes once
/// counterclockwise, i.e. with p decreasing.
pub fn winding_number(params: SymbolParams, point: Complex64, grid: usize) -> Result<i32> {
    if grid < 256 {
        return Err(Error::Parameter(format!("winding grid {grid} < 256")));
    }
    let curve = (0..grid)
        .map(|k| eval_symbol(params, Complex64::new(TAU * (k as f64 + 0.5) / grid as f64, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    let scale = curve.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let d = polyline_distance(&curve, point);
    if d <= 1e-10 * scale {
        return Err(Error::OnCurve { distance: d });
    }
    Ok(-polyline_winding(&curve, point))
}

/// Winding of the closed polyline through `pts` about `point`, counterclockwise positive.
pub fn polyline_winding(pts: &[Complex64], point: Complex64) -> i32 {
    let mut total = 0.0;
    for (k, z) in pts.iter().enumerate() {
        let w = pts[(k + 1) % pts.len()];
        total += ((w - point) / (z - point)).arg();
    }
    (total / TAU).round() as i32
}

/// Distance from `point` to the closed polyline through `pts`.
pub fn polyline_distance(pts: &[Complex64], point: Complex64) -> f64 {
    let mut best = f64::INFINITY;
    for (k, &a) in pts.iter().enumerate() {
        let b = pts[(k + 1) % pts.len()];
        let ab = b - a;
        let len2 = ab.norm_sqr();
        let t = if len2 == 0.0 {
            0.0
        } else {
            ((point - a) * ab.conj()).re.clamp(0.0, len2) / len2
        };
        best = best.min((a + ab * t - point).norm());
    }
    best
}

const NEWTON_MAX_ITER: usize = 100;
const NEWTON_MAX_STEP: f64 = 0.5;

fn newton(params: SymbolParams, e: Complex64, guess: Complex64, tol: f64) -> (Complex64, f64) {
    let mut p = reduce(guess);
    let mut res = match eval_symbol(params, p) {
        Ok(a) => (a - e).norm(),
        Err(_) => return (p, f64::INFINITY),
    };
    for _ in 0..NEWTON_MAX_ITER {
        if res <= tol {
            break;
        }
        let (Ok(a), Ok(da)) = (eval_symbol(params, p), symbol_derivative(params, p)) else {
            break;
        };
        if da.norm() == 0.0 || !da.is_finite() {
            break;
        }
        let mut step = (a - e) / da;
        if step.norm() > NEWTON_MAX_STEP {
            step *= NEWTON_MAX_STEP / step.norm();
        }
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..40 {
            let q = reduce(p - step * t);
            if let Ok(aq) = eval_symbol(params, q) {
                let rq = (aq - e).norm();
                if rq < res {
                    p = q;
                    res = rq;
                    moved = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (p, res)
}

/// Solve a(e^{-ip}) = E by damped Newton from `guess`, with perturbed restarts.
pub fn invert_symbol(params: SymbolParams, e: Complex64, guess: Complex64) -> Result<Momentum> {
    let tol = 1e-10 * (1.0 + e.norm());
    let (mut best_p, mut best_res) = newton(params, e, guess, tol);
    for k in 0..8 {
        if best_res <= tol {
            break;
        }
        let radius = 0.02 * (1 + k / 2) as f64;
        let offset = Complex64::from_polar(radius, TAU * k as f64 / 8.0);
        let (p, res) = newton(params, e, guess + offset, tol);
        if res < best_res {
            best_p = p;
            best_res = res;
        }
    }
    if best_res <= tol {
        Ok(Momentum { p: best_p })
    } else {
        Err(Error::Convergence { re: e.re, im: e.im, residual: best_res })
    }
}

/// Starting point for [`invert_symbol`]: the real momentum whose phase
/// matches E, lifted by the asymptotic imaginary part for order n.
pub fn seed_momentum(params: SymbolParams, e: Complex64, n: usize) -> Complex64 {
    let im = params.decay() * (n as f64).ln() / n as f64;
    let re = if params.beta != 0.0 {
        PI - e.arg() / params.beta
    } else if params.alpha != 0.0 {
        let r = e.norm().powf(0.5 / params.alpha) / 2.0;
        2.0 * r.clamp(0.0, 1.0).asin()
    } else {
        PI
    };
    Complex64::new(re.clamp(1e-6, TAU - 1e-6), im)
}

/// Momentum of an eigenvalue of the order-n matrix: phase seed first, then a
/// coarse grid search if Newton fails from there.
pub fn locate_momentum(params: SymbolParams, e: Complex64, n: usize) -> Result<Momentum> {
    let seed = seed_momentum(params, e, n);
    if let Ok(m) = invert_symbol(params, e, seed) {
        return Ok(m);
    }
    let mut best = (seed, f64::INFINITY);
    for i in 0..720 {
        let re = TAU * (i as f64 + 0.5) / 720.0;
        for k in 0..26 {
            let im = -0.1 + 0.02 * k as f64;
            let p = Complex64::new(re, im);
            if let Ok(a) = eval_symbol(params, p) {
                let r = (a - e).norm();
                if r < best.1 {
                    best = (p, r);
                }
            }
        }
    }
    invert_symbol(params, e, best.0)
}

/// p^ℓ ≈ 2πℓ/n + i(2α+1) ln n / n.
pub fn asymptotic_momentum(n: usize, ell: usize, params: SymbolParams) -> Momentum {
    let nf = n as f64;
    Momentum { p: Complex64::new(TAU * ell as f64 / nf, params.decay() * nf.ln() / nf) }
}

/// E^ℓ ≈ (-1)^β 4^α sin^{2α}(πℓ/n) e^{-2iπβℓ/n}.
pub fn asymptotic_eigenvalue(params: SymbolParams, n: usize, ell: usize) -> Complex64 {
    let x = PI * ell as f64 / n as f64;
    let modulus = 4f64.powf(params.alpha) * x.sin().powf(2.0 * params.alpha);
    Complex64::from_polar(modulus, PI * params.beta - 2.0 * x * params.beta)
}

fn asymptotic_exponent(params: SymbolParams, n: usize, ell: usize) -> Complex64 {
    let nf = n as f64;
    Complex64::new(-params.decay() * nf.ln() / nf, TAU * ell as f64 / nf)
}

/// Unit-normalized (asymptotically) right eigenvector, geometric decay from j = 0.
pub fn asymptotic_right_eigenvector(params: SymbolParams, n: usize, ell: usize) -> Vec<Complex64> {
    let nf = n as f64;
    let amp = (2.0 * params.decay() * nf.ln() / nf).sqrt();
    let k = asymptotic_exponent(params, n, ell);
    (0..n).map(|j| amp * (k * j as f64).exp()).collect()
}

/// Left eigenvector c^ℓ ψ_{n-j-1} with c^ℓ fixed by Σ_j ψ̃_j ψ_j = 1.
pub fn asymptotic_left_eigenvector(params: SymbolParams, n: usize, ell: usize) -> Vec<Complex64> {
    let nf = n as f64;
    let amp = 1.0 / (nf * (2.0 * params.decay() * nf.ln() / nf).sqrt());
    let k = asymptotic_exponent(params, n, ell);
    (0..n).map(|j| amp * (-k * j as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trivial_symbol() {
        let p = SymbolParams::new(0.0, 0.0).unwrap();
        assert_eq!(eval_symbol(p, c(1.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert_eq!(symbol_derivative(p, c(1.0, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn working_symbol_at_pi() {
        let a = eval_symbol(SymbolParams::working(), c(PI, 0.0)).unwrap();
        assert!((a - c(4f64.powf(1.0 / 3.0), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn single_mode_derivative() {
        let p = SymbolParams::new(0.0, 1.0).unwrap();
        let d = symbol_derivative(p, c(0.0, 0.0)).unwrap();
        assert!((d - c(0.0, 1.0)).norm() < 1e-14);
        assert!((eval_symbol(p, c(1.0, 0.0)).unwrap() + c(0.0, -1.0).exp()).norm() < 1e-14);
    }

    #[test]
    fn pole_and_zero_at_origin() {
        let neg = SymbolParams::new(-0.25, 0.1).unwrap();
        assert!(matches!(eval_symbol(neg, c(0.0, 0.0)), Err(Error::SingularPoint { .. })));
        assert!(matches!(eval_symbol(neg, c(TAU, 0.0)), Err(Error::SingularPoint { .. })));
        let pos = SymbolParams::working();
        assert_eq!(eval_symbol(pos, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert!(symbol_derivative(pos, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn invalid_params() {
        assert!(SymbolParams::new(-0.5, 0.0).is_err());
        assert!(SymbolParams::new(f64::NAN, 0.0).is_err());
        assert!(SymbolParams::new(0.0, 1.0).is_ok());
    }

    #[test]
    fn frozen_coefficients() {
        // independent quadrature of (1/2π)∫ e^{irp} a(e^{-ip}) dp
        let p = SymbolParams::working();
        for (r, v) in [
            (0, 0.850_202_656_223_263_2),
            (1, 0.077_291_150_565_751_3),
            (-1, -0.850_202_656_223_263_2),
            (2, 0.031_825_767_880_015_2),
            (-3, -0.031_825_767_880_015_2),
        ] {
            assert!((fourier_coefficient(p, r) - v).abs() < 1e-13, "r = {r}");
        }
        let one = SymbolParams::new(0.0, 1.0).unwrap();
        assert_eq!(fourier_coefficient(one, 1), -1.0);
        for r in [-3, -1, 0, 2, 5] {
            assert_eq!(fourier_coefficient(one, r), 0.0);
        }
        let id = SymbolParams::new(0.0, 0.0).unwrap();
        assert_eq!(fourier_coefficient(id, 0), 1.0);
        assert_eq!(fourier_coefficient(id, 3), 0.0);
    }

    #[test]
    fn windings() {
        let w = winding_number(SymbolParams::working(), c(0.5, 0.0), 1024).unwrap();
        assert_eq!(w, -1);
        let plus = SymbolParams::new(1.0 / 3.0, 0.5).unwrap();
        assert_eq!(winding_number(plus, c(0.5, 0.0), 1024).unwrap(), 1);
        let id = SymbolParams::new(0.0, 0.0).unwrap();
        assert_eq!(winding_number(id, c(5.0, 0.0), 256).unwrap(), 0);
        assert!(winding_number(id, c(1.0, 0.0), 256).is_err());
        assert!(winding_number(id, c(5.0, 0.0), 100).is_err());
    }

    #[test]
    fn closed_form_inversion() {
        let p = SymbolParams::new(0.0, 1.0).unwrap();
        let e = -(c(0.0, -1.0)).exp();
        let m = invert_symbol(p, e, c(1.3, 0.1)).unwrap();
        assert!((m.p - c(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn asymptotic_values() {
        let w = SymbolParams::working();
        let m = asymptotic_momentum(160, 80, w);
        assert!((m.p.re - PI).abs() < 1e-15);
        assert!((m.p.im - 5.0 / 3.0 * 160f64.ln() / 160.0).abs() < 1e-15);
        assert!((m.p.im - 0.0529).abs() < 5e-5);
        assert_eq!(asymptotic_momentum(160, 0, w).p.re, 0.0);
        let edge = SymbolParams { alpha: -0.5, beta: 0.0 };
        assert_eq!(asymptotic_momentum(64, 5, edge).p.im, 0.0);
        let e = asymptotic_eigenvalue(w, 160, 80);
        assert!((e - c(4f64.powf(1.0 / 3.0), 0.0)).norm() < 1e-14);
        let (a, b) = (asymptotic_eigenvalue(w, 160, 40), asymptotic_eigenvalue(w, 160, 120));
        assert!((a - b.conj()).norm() < 1e-14);
        let id = SymbolParams::new(0.0, 0.0).unwrap();
        assert!((asymptotic_eigenvalue(id, 10, 3) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn asymptotic_vectors() {
        let w = SymbolParams::working();
        let n = 160;
        let r = asymptotic_right_eigenvector(w, n, 37);
        let l = asymptotic_left_eigenvector(w, n, 37);
        let norm: f64 = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 0.1);
        let amp = (2.0 * w.decay() * (n as f64).ln() / n as f64).sqrt();
        assert!((r[0].re - amp).abs() < 1e-15 && r[0].im == 0.0);
        for j in 1..n {
            assert!(r[j].norm() < r[j - 1].norm());
        }
        let rate = (-w.decay() * (n as f64).ln() / n as f64).exp();
        assert!((r[1].norm() / r[0].norm() - rate).abs() < 1e-14);
        assert!((l[1].norm() / l[0].norm() - 1.0 / rate).abs() < 1e-12);
        let ratio = r[n - 1].norm() / r[0].norm();
        let expect = (n as f64).powf(-w.decay() * (n - 1) as f64 / n as f64);
        assert!((ratio / expect - 1.0).abs() < 1e-10);
        let pair: Complex64 = l.iter().zip(&r).map(|(a, b)| a * b).sum();
        assert!((pair - 1.0).norm() < 1e-12);
    }
}
