//! Right and left eigenpairs, condition numbers, momentum ordering and
//! matching of eigenvalues across a σ grid.

use crate::eigen::{eig_complex, eig_real};
use crate::error::{Error, Result};
use crate::symbol::{locate_momentum, SymbolParams};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

/// Eigendecomposition with a biorthogonal dual basis.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub n: usize,
    pub eigenvalues: Vec<Complex64>,
    /// ψ^ℓ, unit 2-norm.
    pub right: Vec<Vec<Complex64>>,
    /// ψ̃^ℓ, the rows of Ψ^{-1}.
    pub left: Vec<Vec<Complex64>>,
    /// c^ℓ = (Σ_j ψ_{n-j-1} ψ_j)^{-1}.
    pub c: Vec<Complex64>,
    pub kappa: Vec<f64>,
    /// Filled by [`order_by_momentum`].
    pub momenta: Option<Vec<Complex64>>,
    /// Solver position of each stored eigenpair.
    pub order: Vec<usize>,
    /// ‖Ψ‖₁‖Ψ^{-1}‖₁.
    pub basis_condition: f64,
    pub min_gap: f64,
    /// Frobenius norm of the decomposed matrix.
    pub matrix_norm: f64,
}

pub const DEGENERACY_TOL: f64 = 1e-12;
pub const BASIS_CONDITION_LIMIT: f64 = 1e14;

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn min_pair_gap(values: &[Complex64]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            gap = gap.min((values[i] - values[j]).norm());
        }
    }
    gap
}

fn one_norm(m: &DMatrix<Complex64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Full eigendecomposition of a real matrix.
pub fn eig_full(matrix: &DMatrix<f64>) -> Result<Spectrum> {
    let eig = eig_real(matrix)?;
    finish(eig.values, eig.vectors, matrix.norm())
}

/// Full eigendecomposition of a complex matrix.
pub fn eig_full_complex(matrix: &DMatrix<Complex64>) -> Result<Spectrum> {
    let eig = eig_complex(matrix)?;
    finish(eig.values, eig.vectors, matrix.norm())
}

fn finish(values: Vec<Complex64>, vectors: Vec<Vec<Complex64>>, matrix_norm: f64) -> Result<Spectrum> {
    let n = values.len();
    let eig = crate::eigen::ComplexEigen { values, vectors };
    let min_gap = min_pair_gap(&eig.values);
    if n > 1 && min_gap < DEGENERACY_TOL * matrix_norm.max(f64::MIN_POSITIVE) {
        return Err(Error::Degenerate { gap: min_gap });
    }
    let psi = DMatrix::from_fn(n, n, |i, l| eig.vectors[l][i]);
    let inv = psi
        .clone()
        .lu()
        .try_inverse()
        .ok_or(Error::IllPosedBasis { cond: f64::INFINITY })?;
    let basis_condition = one_norm(&psi) * one_norm(&inv);
    if !(basis_condition <= BASIS_CONDITION_LIMIT) {
        return Err(Error::IllPosedBasis { cond: basis_condition });
    }
    let left: Vec<Vec<Complex64>> = (0..n).map(|l| inv.row(l).iter().copied().collect()).collect();
    let c = eig
        .vectors
        .iter()
        .map(|v| {
            let s: Complex64 = (0..n).map(|j| v[n - j - 1] * v[j]).sum();
            Complex64::new(1.0, 0.0) / s
        })
        .collect();
    let kappa = left.iter().map(|w| norm2(w)).collect();
    Ok(Spectrum {
        n,
        eigenvalues: eig.values,
        right: eig.vectors,
        left,
        c,
        kappa,
        momenta: None,
        order: (0..n).collect(),
        basis_condition,
        min_gap,
        matrix_norm,
    })
}

/// κ = ‖ψ̃‖‖ψ‖/|⟨ψ̃|ψ⟩|.
pub fn condition_numbers(spec: &Spectrum) -> Vec<f64> {
    spec.left
        .iter()
        .zip(&spec.right)
        .map(|(w, v)| norm2(w) * norm2(v) / dot(w, v).norm())
        .collect()
}

impl Spectrum {
    /// Reorder all per-eigenvalue data so entry i is old entry `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Spectrum {
        Spectrum {
            n: self.n,
            eigenvalues: perm.iter().map(|&i| self.eigenvalues[i]).collect(),
            right: perm.iter().map(|&i| self.right[i].clone()).collect(),
            left: perm.iter().map(|&i| self.left[i].clone()).collect(),
            c: perm.iter().map(|&i| self.c[i]).collect(),
            kappa: perm.iter().map(|&i| self.kappa[i]).collect(),
            momenta: self.momenta.as_ref().map(|m| perm.iter().map(|&i| m[i]).collect()),
            order: perm.iter().map(|&i| self.order[i]).collect(),
            ..*self
        }
    }

    /// max_{ℓ≠k} |⟨ψ̃^ℓ|ψ^k⟩| and max_ℓ |⟨ψ̃^ℓ|ψ^ℓ⟩ - 1|.
    pub fn biorthogonality_residual(&self) -> (f64, f64) {
        let mut off: f64 = 0.0;
        let mut diag: f64 = 0.0;
        for (l, w) in self.left.iter().enumerate() {
            for (k, v) in self.right.iter().enumerate() {
                let s = dot(w, v);
                if l == k {
                    diag = diag.max((s - 1.0).norm());
                } else {
                    off = off.max(s.norm());
                }
            }
        }
        (off, diag)
    }

    /// Largest relative error of ψ̃^ℓ against c^ℓ·reverse(ψ^ℓ).
    pub fn reversal_error(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for l in 0..n {
            let num: f64 = (0..n)
                .map(|j| (self.left[l][j] - self.c[l] * self.right[l][n - j - 1]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            worst = worst.max(num / norm2(&self.left[l]));
        }
        worst
    }

    /// Largest distance from an eigenvalue's conjugate to the nearest eigenvalue.
    pub fn conjugation_defect(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|e| {
                self.eigenvalues
                    .iter()
                    .map(|f| (e.conj() - f).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }

    pub fn kappa_max(&self) -> f64 {
        self.kappa.iter().copied().fold(1.0, f64::max)
    }

    /// max Re E - min Re E.
    pub fn real_diameter(&self) -> f64 {
        let (lo, hi) = self
            .eigenvalues
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| (lo.min(e.re), hi.max(e.re)));
        hi - lo
    }

    /// Largest pairwise distance between eigenvalues.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for a in &self.eigenvalues {
            for b in &self.eigenvalues {
                d = d.max((a - b).norm());
            }
        }
        d
    }
}

/// Momenta p^ℓ for all eigenvalues and the spectrum reordered by Re p.
pub fn order_by_momentum(spec: Spectrum, params: SymbolParams) -> Result<Spectrum> {
    let n = spec.n;
    let momenta = spec
        .eigenvalues
        .par_iter()
        .enumerate()
        .map(|(i, &e)| locate_momentum(params, e, n).map(|m| m.p).map_err(|err| err.at(i)))
        .collect::<Result<Vec<_>>>()?;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by(|&a, &b| {
        momenta[a]
            .re
            .total_cmp(&momenta[b].re)
            .then(spec.eigenvalues[a].im.total_cmp(&spec.eigenvalues[b].im))
    });
    let with = Spectrum { momenta: Some(momenta), ..spec };
    Ok(with.permuted(&perm))
}

/// Minimum-cost perfect matching of a square cost matrix (rows to columns).
pub fn assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut ans = vec![0; n];
    for j in 1..=n {
        ans[p[j] - 1] = j - 1;
    }
    ans
}

/// Ratio within which two candidate targets count as a tie.
pub const TIE_RATIO: f64 = 1.1;

/// Match eigenpairs `(values, vectors)` to the eigenpairs of `next`.
/// Returns `None` when some source has two candidates within [`TIE_RATIO`]
/// that neither eigenvector overlap nor conjugate symmetry can separate.
pub fn match_step(
    values: &[Complex64],
    vectors: &[&[Complex64]],
    next: &Spectrum,
) -> Option<Vec<usize>> {
    let n = values.len();
    let cost: Vec<Vec<f64>> = values
        .iter()
        .map(|a| next.eigenvalues.iter().map(|b| (a - b).norm_sqr()).collect())
        .collect();
    let assign = assignment(&cost);
    let scale = 1.0 + next.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tol = 1e-12 * scale;
    let mut owner = vec![0; n];
    for (a, &b) in assign.iter().enumerate() {
        owner[b] = a;
    }
    for a in 0..n {
        let b = assign[a];
        let db = cost[a][b].sqrt();
        for b2 in 0..n {
            if b2 == b {
                continue;
            }
            let d2 = cost[a][b2].sqrt();
            if d2 > TIE_RATIO * db {
                continue;
            }
            let a2 = owner[b2];
            let partner = (values[a2] - values[a].conj()).norm() <= tol;
            let real_pair = values[a].im.abs() <= tol
                && values[a2].im.abs() <= tol
                && (next.eigenvalues[b2] - next.eigenvalues[b].conj()).norm() <= tol;
            if (partner || real_pair) && d2 > 0.0 {
                continue;
            }
            let ob = dot_conj(vectors[a], &next.right[b]);
            let o2 = dot_conj(vectors[a], &next.right[b2]);
            if ob >= TIE_RATIO * o2 {
                continue;
            }
            return None;
        }
    }
    Some(assign)
}

fn dot_conj(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm()
}

/// Eigenvalue paths over a σ grid, labeled by position in the first spectrum.
#[derive(Debug, Clone)]
pub struct TrajectorySet {
    pub sigma_grid: Vec<f64>,
    /// `index[k][ℓ]`: position of path ℓ inside the k-th spectrum.
    pub index: Vec<Vec<usize>>,
    /// `values[k][ℓ]` = E^ℓ(σ_k).
    pub values: Vec<Vec<Complex64>>,
    /// `kappa[k][ℓ]` = κ(E^ℓ(σ_k)).
    pub kappa: Vec<Vec<f64>>,
}

impl TrajectorySet {
    pub fn path(&self, ell: usize) -> Vec<Complex64> {
        self.values.iter().map(|row| row[ell]).collect()
    }

    pub fn kappa_path(&self, ell: usize) -> Vec<f64> {
        self.kappa.iter().map(|row| row[ell]).collect()
    }

    /// Largest single-step displacement along any path.
    pub fn max_step(&self) -> f64 {
        self.values
            .windows(2)
            .flat_map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (a - b).norm()))
            .fold(0.0, f64::max)
    }

    fn from_levels(levels: &[(f64, &Spectrum)], index: Vec<Vec<usize>>) -> Self {
        let values = index
            .iter()
            .zip(levels)
            .map(|(idx, (_, s))| idx.iter().map(|&i| s.eigenvalues[i]).collect())
            .collect();
        let kappa = index
            .iter()
            .zip(levels)
            .map(|(idx, (_, s))| idx.iter().map(|&i| s.kappa[i]).collect())
            .collect();
        TrajectorySet { sigma_grid: levels.iter().map(|(s, _)| *s).collect(), index, values, kappa }
    }
}

/// Match consecutive spectra; a tie anywhere is reported as a grid that is too coarse.
pub fn track_trajectories(levels: &[(f64, &Spectrum)]) -> Result<TrajectorySet> {
    track_with(levels, |_, _, _| None)
}

/// As [`track_trajectories`], but ties between σ_k and σ_{k+1} are resolved
/// by solving at the midpoint (up to `max_depth` halvings).
pub fn track_adaptive<F>(levels: &[(f64, &Spectrum)], solve: F, max_depth: usize) -> Result<TrajectorySet>
where
    F: Fn(f64) -> Result<Spectrum>,
{
    track_with(levels, |from, to, start| {
        Some(refine(from, to, start, &solve, max_depth))
    })
}

type Pairs = (Vec<Complex64>, Vec<Vec<Complex64>>);

fn refine<F>(
    from: f64,
    to: (f64, &Spectrum),
    start: Pairs,
    solve: &F,
    depth: usize,
) -> Result<Vec<usize>>
where
    F: Fn(f64) -> Result<Spectrum>,
{
    let refs: Vec<&[Complex64]> = start.1.iter().map(|v| v.as_slice()).collect();
    if let Some(m) = match_step(&start.0, &refs, to.1) {
        return Ok(m);
    }
    if depth == 0 {
        return Err(Error::GridTooCoarse { from, to: to.0 });
    }
    let mid = 0.5 * (from + to.0);
    let ms = solve(mid)?;
    let first = refine(from, (mid, &ms), start, solve, depth - 1)?;
    let carry = (
        first.iter().map(|&i| ms.eigenvalues[i]).collect(),
        first.iter().map(|&i| ms.right[i].clone()).collect(),
    );
    refine(mid, to, carry, solve, depth - 1)
}

fn track_with<G>(levels: &[(f64, &Spectrum)], on_tie: G) -> Result<TrajectorySet>
where
    G: Fn(f64, (f64, &Spectrum), Pairs) -> Option<Result<Vec<usize>>>,
{
    if levels.is_empty() {
        return Err(Error::Parameter("no spectra to track".into()));
    }
    let n = levels[0].1.n;
    for (_, s) in levels {
        if s.n != n {
            return Err(Error::Dimension { expected: n, got: s.n });
        }
    }
    if levels.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::Parameter("sigma grid must be strictly ascending".into()));
    }
    let mut index = vec![(0..n).collect::<Vec<usize>>()];
    for k in 1..levels.len() {
        let (s0, prev) = levels[k - 1];
        let prev_idx = &index[k - 1];
        let values: Vec<Complex64> = prev_idx.iter().map(|&i| prev.eigenvalues[i]).collect();
        let vectors: Vec<&[Complex64]> = prev_idx.iter().map(|&i| prev.right[i].as_slice()).collect();
        let m = match match_step(&values, &vectors, levels[k].1) {
            Some(m) => m,
            None => {
                let start = (values.clone(), vectors.iter().map(|v| v.to_vec()).collect());
                match on_tie(s0, levels[k], start) {
                    Some(r) => r?,
                    None => return Err(Error::GridTooCoarse { from: s0, to: levels[k].0 }),
                }
            }
        };
        index.push(m);
    }
    Ok(TrajectorySet::from_levels(levels, index))
}

/// Halvings allowed per interval when resolving ties.
pub const MAX_REFINE_DEPTH: usize = 14;

/// Run `solve` on every grid point after the first (whose spectrum is
/// `base`) and track the eigenvalues from `base` onward.
pub fn solve_and_track<F>(base: &Spectrum, grid: &[f64], solve: F) -> Result<(Vec<Spectrum>, TrajectorySet)>
where
    F: Fn(f64) -> Result<Spectrum> + Sync,
{
    if grid.is_empty() {
        return Err(Error::Parameter("empty sigma grid".into()));
    }
    let rest = grid[1..]
        .par_iter()
        .map(|&s| solve(s))
        .collect::<Result<Vec<_>>>()?;
    let mut spectra = Vec::with_capacity(grid.len());
    spectra.push(base.clone());
    spectra.extend(rest);
    let levels: Vec<(f64, &Spectrum)> = grid.iter().copied().zip(spectra.iter()).collect();
    let tracks = track_adaptive(&levels, &solve, MAX_REFINE_DEPTH)?;
    Ok((spectra, tracks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::fourier_coefficient;
    use crate::toeplitz::build_toeplitz;

    #[test]
    fn identity_is_degenerate() {
        let m = DMatrix::<f64>::identity(5, 5);
        assert!(matches!(eig_full(&m), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn nilpotent_is_rejected() {
        let t = build_toeplitz(SymbolParams::new(0.0, 1.0).unwrap(), 6).unwrap();
        let err = eig_full(&t.entries).unwrap_err();
        assert!(matches!(err, Error::Degenerate { .. }), "{err:?}");
    }

    #[test]
    fn two_by_two_closed_form() {
        let p = SymbolParams::working();
        let (t1, tm1) = (fourier_coefficient(p, 1), fourier_coefficient(p, -1));
        let m = DMatrix::from_row_slice(2, 2, &[0.0, tm1, t1, 0.0]);
        let s = eig_full(&m).unwrap();
        let root = (t1 * -tm1).sqrt();
        let mut ims: Vec<f64> = s.eigenvalues.iter().map(|e| e.im).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + root).abs() < 1e-15 && (ims[1] - root).abs() < 1e-15);
        assert!(s.eigenvalues.iter().all(|e| e.re.abs() < 1e-15));
    }

    #[test]
    fn symmetric_matrix_is_well_conditioned() {
        let m = DMatrix::from_fn(6, 6, |i, j| 1.0 / (1.0 + i as f64 + j as f64) + if i == j { i as f64 } else { 0.0 });
        let s = eig_full(&m).unwrap();
        for k in condition_numbers(&s) {
            assert!((k - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn hungarian_small() {
        let cost = vec![vec![4.0, 1.0, 3.0], vec![2.0, 0.0, 5.0], vec![3.0, 2.0, 2.0]];
        assert_eq!(assignment(&cost), vec![1, 0, 2]);
    }

    #[test]
    fn single_level_tracks_identity() {
        let t = build_toeplitz(SymbolParams::working(), 12).unwrap();
        let s = eig_full(&t.entries).unwrap();
        let tr = track_trajectories(&[(0.0, &s)]).unwrap();
        assert_eq!(tr.index, vec![(0..12).collect::<Vec<_>>()]);
    }
}
