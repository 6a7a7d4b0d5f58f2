//! Dense Toeplitz matrices T[j][k] = t_{j-k} and their closed-form trace and determinant.

use crate::error::{Error, Result};
use crate::symbol::{fourier_coefficient, SymbolParams};
use nalgebra::DMatrix;
use rayon::prelude::*;

pub use crate::special::ln_barnes_g as log_barnes_g;

/// Default cap on the matrix order.
pub const MAX_ORDER: usize = 4096;

#[derive(Debug, Clone)]
pub struct ToeplitzMatrix {
    pub n: usize,
    pub params: SymbolParams,
    pub entries: DMatrix<f64>,
}

impl ToeplitzMatrix {
    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.entries[(j, k)]
    }

    pub fn diagonal_sum(&self) -> f64 {
        self.entries.trace()
    }
}

pub fn build_toeplitz(params: SymbolParams, n: usize) -> Result<ToeplitzMatrix> {
    build_toeplitz_capped(params, n, MAX_ORDER)
}

pub fn build_toeplitz_capped(params: SymbolParams, n: usize, limit: usize) -> Result<ToeplitzMatrix> {
    params.validate()?;
    if n < 2 {
        return Err(Error::Parameter(format!("matrix order {n} < 2")));
    }
    if n > limit {
        return Err(Error::Capacity { n, limit });
    }
    let offset = n as i64 - 1;
    let t: Vec<f64> = (-offset..=offset)
        .into_par_iter()
        .map(|r| fourier_coefficient(params, r))
        .collect();
    let entries = DMatrix::from_fn(n, n, |j, k| t[(j as i64 - k as i64 + offset) as usize]);
    Ok(ToeplitzMatrix { n, params, entries })
}

/// Tr T = n Γ(2α+1) / [Γ(α+β+1) Γ(α-β+1)] = n t_0.
pub fn closed_form_trace(params: SymbolParams, n: usize) -> f64 {
    n as f64 * fourier_coefficient(params, 0)
}

/// ln Det T from the Barnes-G closed form.
pub fn ln_closed_form_determinant(params: SymbolParams, n: usize) -> Result<f64> {
    params.validate()?;
    let SymbolParams { alpha, beta } = params;
    let negative_integer = |s: f64| s < 0.0 && (s - s.round()).abs() < 1e-12;
    if negative_integer(alpha + beta) || negative_integer(alpha - beta) {
        return Err(Error::Parameter("alpha ± beta is a negative integer".into()));
    }
    if 1.0 + alpha + beta <= 0.0 || 1.0 + alpha - beta <= 0.0 {
        return Err(Error::Parameter(format!(
            "determinant formula needs 1 + alpha ± beta > 0 (alpha = {alpha}, beta = {beta})"
        )));
    }
    if n == 0 {
        return Err(Error::Parameter("determinant needs n >= 1".into()));
    }
    let nf = n as f64;
    let g = log_barnes_g;
    let constant = g(1.0 + alpha + beta)? + g(1.0 + alpha - beta)? - g(1.0 + 2.0 * alpha)?;
    let growth = g(1.0 + nf)? + g(1.0 + nf + 2.0 * alpha)?
        - g(1.0 + nf + alpha + beta)?
        - g(1.0 + nf + alpha - beta)?;
    Ok(constant + growth)
}

/// Det T from the Barnes-G closed form; positive whenever defined.
pub fn closed_form_determinant(params: SymbolParams, n: usize) -> Result<f64> {
    Ok(ln_closed_form_determinant(params, n)?.exp())
}

/// Determinant by partial-pivoting elimination, for checking the closed form.
pub fn elimination_determinant(m: &DMatrix<f64>) -> f64 {
    m.clone().lu().determinant()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_shift() {
        let id = build_toeplitz(SymbolParams::new(0.0, 0.0).unwrap(), 5).unwrap();
        assert_eq!(id.entries, DMatrix::identity(5, 5));
        let shift = build_toeplitz(SymbolParams::new(0.0, 1.0).unwrap(), 4).unwrap();
        for j in 0..4 {
            for k in 0..4 {
                let want = if j == k + 1 { -1.0 } else { 0.0 };
                assert_eq!(shift.get(j, k), want);
            }
        }
    }

    #[test]
    fn working_signs() {
        let t = build_toeplitz(SymbolParams::working(), 160).unwrap();
        assert!((t.get(0, 0) - 0.850_202_656_223_263_2).abs() < 1e-13);
        for d in 1..20 {
            assert!(t.get(d, 0) > 0.0);
            assert!(t.get(0, d) < 0.0);
        }
    }

    #[test]
    fn bad_orders() {
        let p = SymbolParams::working();
        assert!(build_toeplitz(p, 1).is_err());
        assert!(matches!(build_toeplitz_capped(p, 100, 50), Err(Error::Capacity { .. })));
    }

    #[test]
    fn trivial_determinant_and_trace() {
        let id = SymbolParams::new(0.0, 0.0).unwrap();
        for n in [1, 7, 40] {
            assert!((closed_form_determinant(id, n).unwrap() - 1.0).abs() < 1e-9);
        }
        assert_eq!(closed_form_trace(id, 7), 7.0);
        assert_eq!(closed_form_trace(SymbolParams::working(), 0), 0.0);
    }

    #[test]
    fn determinant_domain() {
        let p = SymbolParams::new(0.2, 1.5).unwrap();
        assert!(closed_form_determinant(p, 10).is_err());
    }
}
