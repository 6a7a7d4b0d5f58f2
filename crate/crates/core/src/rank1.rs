//! Rank-1 perturbations T + σ e_j e_k^T: resolvent condition, runaway census
//! and the winding of the first-order correction.

use crate::error::{Error, Result};
use crate::spectral::{eig_full, order_by_momentum, solve_and_track, Spectrum};
use crate::symbol::{polyline_distance, polyline_winding, SymbolParams};
use crate::toeplitz::build_toeplitz;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// σ A_jk with A_jk = e_j e_k^T, indices 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankOnePerturbation {
    pub j: usize,
    pub k: usize,
    pub sigma: f64,
}

impl RankOnePerturbation {
    pub fn apply(&self, t: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let n = t.nrows();
        if self.j >= n || self.k >= n {
            return Err(Error::Parameter(format!("index ({}, {}) outside order {n}", self.j, self.k)));
        }
        let mut m = t.clone();
        m[(self.j, self.k)] += self.sigma;
        Ok(m)
    }
}

/// [R(λ)]_{kj} = Σ_m ψ^m_k ψ̃^m_j / (E^m - λ), R(λ) = (T - λ)^{-1}.
pub fn resolvent_entry(spec: &Spectrum, lambda: Complex64, k: usize, j: usize) -> Result<Complex64> {
    if k >= spec.n || j >= spec.n {
        return Err(Error::Dimension { expected: spec.n, got: k.max(j) + 1 });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..spec.n {
        let d = spec.eigenvalues[m] - lambda;
        if d.norm() <= 1e-12 * (1.0 + lambda.norm()) {
            return Err(Error::Pole(m));
        }
        acc += spec.right[m][k] * spec.left[m][j] / d;
    }
    Ok(acc)
}

/// [R(λ)]_{kj} from a dense solve of (T - λ)x = e_j.
pub fn resolvent_entry_direct(t: &DMatrix<f64>, lambda: Complex64, k: usize, j: usize) -> Result<Complex64> {
    let n = t.nrows();
    let a = DMatrix::from_fn(n, n, |r, c| {
        Complex64::new(t[(r, c)], 0.0) - if r == c { lambda } else { Complex64::new(0.0, 0.0) }
    });
    let mut e = nalgebra::DVector::from_element(n, Complex64::new(0.0, 0.0));
    e[j] = Complex64::new(1.0, 0.0);
    let x = a.lu().solve(&e).ok_or(Error::Pole(usize::MAX))?;
    Ok(x[k])
}

/// |[R(λ)]_{kj} + 1/σ| at each λ; `None` where λ coincides with an
/// eigenvalue of T (those are not roots of the resolvent condition).
pub fn rank1_root_check(spec: &Spectrum, pert: RankOnePerturbation, eigenvalues: &[Complex64]) -> Vec<Option<f64>> {
    eigenvalues
        .iter()
        .map(|&l| match resolvent_entry(spec, l, pert.k, pert.j) {
            Ok(r) => Some((r + 1.0 / pert.sigma).norm()),
            Err(_) => None,
        })
        .collect()
}

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Counterclockwise convex hull (monotone chain).
pub fn convex_hull(points: &[Complex64]) -> Vec<Complex64> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Complex64> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Complex64>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Area centroid of a simple polygon; `None` if the area vanishes.
pub fn polygon_centroid(poly: &[Complex64]) -> Option<Complex64> {
    let mut area = 0.0;
    let mut c = Complex64::new(0.0, 0.0);
    for (i, &a) in poly.iter().enumerate() {
        let b = poly[(i + 1) % poly.len()];
        let w = a.re * b.im - b.re * a.im;
        area += w;
        c += (a + b) * w;
    }
    let scale = poly.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    if area.abs() <= 1e-14 * scale * scale {
        return None;
    }
    Some(c / (3.0 * area))
}

/// Winding of the closed polyline E₁^1 … E₁^n about the centroid of its convex hull.
pub fn correction_winding(corrections: &[Complex64]) -> Result<i32> {
    if corrections.len() < 8 {
        return Err(Error::Parameter(format!("{} points, need at least 8", corrections.len())));
    }
    let hull = convex_hull(corrections);
    let centre = polygon_centroid(&hull).ok_or(Error::DegenerateCurve)?;
    let scale = corrections.iter().map(|z| (z - centre).norm()).fold(0.0, f64::max);
    if polyline_distance(corrections, centre) <= 1e-9 * scale {
        return Err(Error::DegenerateCurve);
    }
    Ok(polyline_winding(corrections, centre))
}

/// Which rank-1 family a census runs over; indices are 1-based as in A_11.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// A_jj
    Diagonal,
    /// A_1k
    Row,
    /// A_j1
    Column,
}

impl Family {
    /// 0-based (row, column) of the perturbed entry.
    pub fn entry(&self, index: usize) -> (usize, usize) {
        match self {
            Family::Diagonal => (index - 1, index - 1),
            Family::Row => (0, index - 1),
            Family::Column => (index - 1, 0),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Diagonal => "jj",
            Family::Row => "1k",
            Family::Column => "j1",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jj" => Ok(Family::Diagonal),
            "1k" => Ok(Family::Row),
            "j1" => Ok(Family::Column),
            _ => Err(Error::Parameter(format!("unknown family {s}, expected jj, 1k or j1"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Inward,
    Outward,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Runaway {
    /// Momentum-order index at σ = 0 (0-based).
    pub index: usize,
    pub initial: Complex64,
    #[serde(rename = "final")]
    pub end: Complex64,
    pub kappa_max: f64,
    /// Net displacement projected on the initial outward radial direction.
    pub direction: Direction,
    /// Sign of d|E - centroid|/dσ over the last quarter of the grid.
    pub late_radial_sign: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunawayCensus {
    pub params: SymbolParams,
    pub n: usize,
    pub family: Family,
    pub index: usize,
    pub sigma_max: f64,
    pub sigma_grid: Vec<f64>,
    #[serde(rename = "count_type_II")]
    pub count_type_ii: usize,
    pub count_real_collisions: usize,
    pub count_inward: usize,
    pub count_outward: usize,
    /// Trajectories whose κ ever exceeds 10× the median unperturbed κ.
    pub count_kappa_ratio: usize,
    pub winding_of_e1: Option<i32>,
    pub per_runaway: Vec<Runaway>,
    /// Smallest eigenvalue gap met along the grid.
    pub min_gap: f64,
    /// Largest eigenvector-basis condition estimate met along the grid.
    pub max_basis_condition: f64,
}

/// Fraction of the unperturbed real extent an end point must keep from every
/// unperturbed eigenvalue to count as a runaway.
pub const RUNAWAY_DISTANCE: f64 = 0.05;

/// σ = 0 followed by `points` geometrically spaced values from 1e-3 to `sigma_max`.
pub fn census_grid(sigma_max: f64, points: usize) -> Vec<f64> {
    let lo: f64 = 1e-3;
    let mut g = vec![0.0];
    let ratio = (sigma_max / lo).ln();
    for i in 0..points {
        let t = if points == 1 { 1.0 } else { i as f64 / (points - 1) as f64 };
        g.push(lo * (ratio * t).exp());
    }
    g
}

/// Track T + σA over the census grid and count the eigenvalues that leave the spectrum.
pub fn runaway_census(
    params: SymbolParams,
    n: usize,
    family: Family,
    index: usize,
    sigma_max: f64,
    points: usize,
) -> Result<RunawayCensus> {
    if index == 0 || index > n {
        return Err(Error::Parameter(format!("index {index} outside 1..={n}")));
    }
    if family == Family::Diagonal && 2 * index >= n {
        return Err(Error::Parameter(format!("A_jj census needs j < n/2, got {index}")));
    }
    if !(sigma_max > 1e-3) {
        return Err(Error::Parameter("sigma_max must exceed 1e-3".into()));
    }
    let t = build_toeplitz(params, n)?;
    let base = order_by_momentum(eig_full(&t.entries)?, params)?;
    let (j, k) = family.entry(index);
    let grid = census_grid(sigma_max, points);
    let build = |s: f64| {
        let mut m = t.entries.clone();
        m[(j, k)] += s;
        eig_full(&m)
    };
    let (spectra, tracks) = solve_and_track(&base, &grid, build)?;

    let e0 = &base.eigenvalues;
    let extent = base.real_diameter();
    let centroid: Complex64 = e0.iter().sum::<Complex64>() / n as f64;
    let eps_real = 1e-6 * extent;
    let last = grid.len() - 1;
    let mut kappa0 = base.kappa.clone();
    kappa0.sort_by(f64::total_cmp);
    let median_kappa = kappa0[n / 2];

    let mut per_runaway = Vec::new();
    let mut count_real_collisions = 0;
    let mut count_kappa_ratio = 0;
    for l in 0..n {
        let path = tracks.path(l);
        let kp = tracks.kappa_path(l);
        let kappa_max = kp.iter().copied().fold(0.0, f64::max);
        if kappa_max >= 10.0 * median_kappa {
            count_kappa_ratio += 1;
        }
        let end = path[last];
        if e0[l].im.abs() > eps_real && end.im.abs() <= eps_real {
            count_real_collisions += 1;
        }
        let gap = e0.iter().map(|e| (e - end).norm()).fold(f64::INFINITY, f64::min);
        if gap <= RUNAWAY_DISTANCE * extent {
            continue;
        }
        let outward = ((end - e0[l]) * (e0[l] - centroid).conj()).re;
        let q = (3 * grid.len()) / 4;
        let mut slope = 0.0;
        for s in q..last {
            let dr = (path[s + 1] - centroid).norm() - (path[s] - centroid).norm();
            slope += dr / (grid[s + 1] - grid[s]);
        }
        per_runaway.push(Runaway {
            index: l,
            initial: e0[l],
            end,
            kappa_max,
            direction: if outward > 0.0 { Direction::Outward } else { Direction::Inward },
            late_radial_sign: slope.signum(),
        });
    }
    let count_inward = per_runaway.iter().filter(|r| r.direction == Direction::Inward).count();
    let e1: Vec<Complex64> = (0..n).map(|l| base.left[l][j] * base.right[l][k]).collect();
    Ok(RunawayCensus {
        params,
        n,
        family,
        index,
        sigma_max,
        sigma_grid: grid,
        count_type_ii: per_runaway.len(),
        count_real_collisions,
        count_inward,
        count_outward: per_runaway.len() - count_inward,
        count_kappa_ratio,
        winding_of_e1: correction_winding(&e1).ok(),
        min_gap: spectra.iter().map(|s| s.min_gap).fold(f64::INFINITY, f64::min),
        max_basis_condition: spectra.iter().map(|s| s.basis_condition).fold(0.0, f64::max),
        per_runaway,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn unit_circle_winds_once() {
        let pts: Vec<Complex64> = (0..64).map(|l| Complex64::from_polar(1.0, TAU * l as f64 / 64.0)).collect();
        assert_eq!(correction_winding(&pts).unwrap(), 1);
        let back: Vec<Complex64> = pts.iter().rev().copied().collect();
        assert_eq!(correction_winding(&back).unwrap(), -1);
    }

    #[test]
    fn constant_sequence_is_degenerate() {
        let pts = vec![Complex64::new(0.3, 0.1); 16];
        assert!(matches!(correction_winding(&pts), Err(Error::DegenerateCurve)));
        assert!(correction_winding(&pts[..4]).is_err());
    }

    #[test]
    fn hull_of_square_with_interior_point() {
        let c = |a: f64, b: f64| Complex64::new(a, b);
        let pts = [c(0.0, 0.0), c(1.0, 0.0), c(0.5, 0.5), c(1.0, 1.0), c(0.0, 1.0)];
        let hull = convex_hull(&pts);
        assert_eq!(hull.len(), 4);
        let g = polygon_centroid(&hull).unwrap();
        assert!((g - c(0.5, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn family_entries() {
        assert_eq!(Family::Diagonal.entry(3), (2, 2));
        assert_eq!(Family::Row.entry(4), (0, 3));
        assert_eq!(Family::Column.entry(2), (1, 0));
        assert_eq!("1k".parse::<Family>().unwrap(), Family::Row);
        assert!("kk".parse::<Family>().is_err());
    }

    #[test]
    fn geometric_grid() {
        let g = census_grid(20.0, 64);
        assert_eq!(g.len(), 65);
        assert_eq!(g[0], 0.0);
        assert!((g[1] - 1e-3).abs() < 1e-15 && (g[64] - 20.0).abs() < 1e-12);
    }
}
