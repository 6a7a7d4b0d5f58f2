//! Eigenvalues and right eigenvectors of a dense real matrix: diagonal
//! balancing, Householder reduction to Hessenberg form, Francis double-shift
//! QR to real Schur form, then back-substitution for the vectors. Complex
//! matrices go through the single-shift complex Schur form instead.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Eigenpairs in Schur order; vectors have unit 2-norm.
#[derive(Debug, Clone)]
pub struct RealEigen {
    pub values: Vec<Complex64>,
    pub vectors: Vec<Vec<Complex64>>,
}

const EPS: f64 = f64::EPSILON;

/// Diagonal similarity D^{-1} A D with power-of-two entries so that row and
/// column norms are comparable. Returns the scaling.
fn balance(a: &mut [Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut scale = vec![1.0; n];
    let radix = 2.0;
    let sqrdx = radix * radix;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while c >= g {
                f /= radix;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                scale[i] *= f;
                for j in 0..n {
                    a[i][j] /= f;
                    a[j][i] *= f;
                }
            }
        }
        if done {
            return scale;
        }
    }
}

/// Householder reduction to upper Hessenberg form; `v` receives the
/// accumulated orthogonal transformation.
fn orthes(h: &mut [Vec<f64>], v: &mut [Vec<f64>]) {
    let n = h.len();
    if n < 3 {
        for (i, row) in v.iter_mut().enumerate() {
            row.iter_mut().enumerate().for_each(|(j, x)| *x = if i == j { 1.0 } else { 0.0 });
        }
        return;
    }
    let high = n - 1;
    let mut ort = vec![0.0; n];
    for m in 1..high {
        let scale: f64 = (m..=high).map(|i| h[i][m - 1].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[i][m - 1] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = hh.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;
        for j in m..n {
            let mut f = 0.0;
            for i in (m..=high).rev() {
                f += ort[i] * h[i][j];
            }
            f /= hh;
            for i in m..=high {
                h[i][j] -= f * ort[i];
            }
        }
        for row in h.iter_mut().take(high + 1) {
            let mut f = 0.0;
            for j in (m..=high).rev() {
                f += ort[j] * row[j];
            }
            f /= hh;
            for j in m..=high {
                row[j] -= f * ort[j];
            }
        }
        ort[m] *= scale;
        h[m][m - 1] = scale * g;
    }
    for (i, row) in v.iter_mut().enumerate() {
        row.iter_mut().enumerate().for_each(|(j, x)| *x = if i == j { 1.0 } else { 0.0 });
    }
    for m in (1..high).rev() {
        if h[m][m - 1] == 0.0 {
            continue;
        }
        for i in m + 1..=high {
            ort[i] = h[i][m - 1];
        }
        for j in m..=high {
            let mut g = 0.0;
            for i in m..=high {
                g += ort[i] * v[i][j];
            }
            g = (g / ort[m]) / h[m][m - 1];
            for i in m..=high {
                v[i][j] += g * ort[i];
            }
        }
    }
}

fn cdiv(xr: f64, xi: f64, yr: f64, yi: f64) -> (f64, f64) {
    let q = Complex64::new(xr, xi) / Complex64::new(yr, yi);
    (q.re, q.im)
}

/// Real Schur form by shifted QR, then eigenvectors by back-substitution.
/// On return `d + i e` hold the eigenvalues and the columns of `v` the
/// (real-packed) eigenvectors.
fn hqr2(h: &mut [Vec<f64>], v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let nn = h.len() as i64;
    let low: i64 = 0;
    let high: i64 = nn - 1;
    let mut n = nn - 1;
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut t, mut w, mut x, mut y);

    macro_rules! hm {
        ($i:expr, $j:expr) => {
            h[($i) as usize][($j) as usize]
        };
    }
    macro_rules! vm {
        ($i:expr, $j:expr) => {
            v[($i) as usize][($j) as usize]
        };
    }

    let mut norm = 0.0;
    for i in 0..nn {
        for j in (i - 1).max(0)..nn {
            norm += hm!(i, j).abs();
        }
    }

    let mut iter = 0;
    let mut total_iter = 0usize;
    let max_total = 60 * nn as usize + 100;
    while n >= low {
        let mut l = n;
        while l > low {
            s = hm!(l - 1, l - 1).abs() + hm!(l, l).abs();
            if s == 0.0 {
                s = norm;
            }
            if hm!(l, l - 1).abs() < EPS * s {
                break;
            }
            l -= 1;
        }

        if l == n {
            hm!(n, n) += exshift;
            d[n as usize] = hm!(n, n);
            e[n as usize] = 0.0;
            n -= 1;
            iter = 0;
        } else if l == n - 1 {
            w = hm!(n, n - 1) * hm!(n - 1, n);
            p = (hm!(n - 1, n - 1) - hm!(n, n)) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            hm!(n, n) += exshift;
            hm!(n - 1, n - 1) += exshift;
            x = hm!(n, n);
            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                d[(n - 1) as usize] = x + z;
                d[n as usize] = d[(n - 1) as usize];
                if z != 0.0 {
                    d[n as usize] = x - w / z;
                }
                e[(n - 1) as usize] = 0.0;
                e[n as usize] = 0.0;
                x = hm!(n, n - 1);
                s = x.abs() + z.abs();
                p = x / s;
                q = z / s;
                r = (p * p + q * q).sqrt();
                p /= r;
                q /= r;
                for j in (n - 1)..nn {
                    z = hm!(n - 1, j);
                    hm!(n - 1, j) = q * z + p * hm!(n, j);
                    hm!(n, j) = q * hm!(n, j) - p * z;
                }
                for i in 0..=n {
                    z = hm!(i, n - 1);
                    hm!(i, n - 1) = q * z + p * hm!(i, n);
                    hm!(i, n) = q * hm!(i, n) - p * z;
                }
                for i in low..=high {
                    z = vm!(i, n - 1);
                    vm!(i, n - 1) = q * z + p * vm!(i, n);
                    vm!(i, n) = q * vm!(i, n) - p * z;
                }
            } else {
                d[(n - 1) as usize] = x + p;
                d[n as usize] = x + p;
                e[(n - 1) as usize] = z;
                e[n as usize] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            x = hm!(n, n);
            y = 0.0;
            w = 0.0;
            if l < n {
                y = hm!(n - 1, n - 1);
                w = hm!(n, n - 1) * hm!(n - 1, n);
            }
            if iter == 10 {
                exshift += x;
                for i in low..=n {
                    hm!(i, i) -= x;
                }
                s = hm!(n, n - 1).abs() + hm!(n - 1, n - 2).abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in low..=n {
                        hm!(i, i) -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }
            iter += 1;
            total_iter += 1;
            if total_iter > max_total {
                return Err(Error::NoConvergence);
            }

            let mut m = n - 2;
            while m >= l {
                z = hm!(m, m);
                r = x - z;
                s = y - z;
                p = (r * s - w) / hm!(m + 1, m) + hm!(m, m + 1);
                q = hm!(m + 1, m + 1) - z - r - s;
                r = hm!(m + 2, m + 1);
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if hm!(m, m - 1).abs() * (q.abs() + r.abs())
                    < EPS * (p.abs() * (hm!(m - 1, m - 1).abs() + z.abs() + hm!(m + 1, m + 1).abs()))
                {
                    break;
                }
                m -= 1;
            }

            for i in (m + 2)..=n {
                hm!(i, i - 2) = 0.0;
                if i > m + 2 {
                    hm!(i, i - 3) = 0.0;
                }
            }

            let mut k = m;
            while k <= n - 1 {
                let notlast = k != n - 1;
                if k != m {
                    p = hm!(k, k - 1);
                    q = hm!(k + 1, k - 1);
                    r = if notlast { hm!(k + 2, k - 1) } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        k += 1;
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        hm!(k, k - 1) = -s * x;
                    } else if l != m {
                        hm!(k, k - 1) = -hm!(k, k - 1);
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..nn {
                        p = hm!(k, j) + q * hm!(k + 1, j);
                        if notlast {
                            p += r * hm!(k + 2, j);
                            hm!(k + 2, j) -= p * z;
                        }
                        hm!(k, j) -= p * x;
                        hm!(k + 1, j) -= p * y;
                    }
                    for i in 0..=n.min(k + 3) {
                        p = x * hm!(i, k) + y * hm!(i, k + 1);
                        if notlast {
                            p += z * hm!(i, k + 2);
                            hm!(i, k + 2) -= p * r;
                        }
                        hm!(i, k) -= p;
                        hm!(i, k + 1) -= p * q;
                    }
                    for i in low..=high {
                        p = x * vm!(i, k) + y * vm!(i, k + 1);
                        if notlast {
                            p += z * vm!(i, k + 2);
                            vm!(i, k + 2) -= p * r;
                        }
                        vm!(i, k) -= p;
                        vm!(i, k + 1) -= p * q;
                    }
                }
                k += 1;
            }
        }
    }

    if norm == 0.0 {
        return Ok(());
    }

    for n in (0..nn).rev() {
        p = d[n as usize];
        q = e[n as usize];
        if q == 0.0 {
            let mut l = n;
            hm!(n, n) = 1.0;
            let mut i = n - 1;
            while i >= 0 {
                w = hm!(i, i) - p;
                r = 0.0;
                for j in l..=n {
                    r += hm!(i, j) * hm!(j, n);
                }
                if e[i as usize] < 0.0 {
                    z = w;
                    s = r;
                } else {
                    l = i;
                    if e[i as usize] == 0.0 {
                        hm!(i, n) = if w != 0.0 { -r / w } else { -r / (EPS * norm) };
                    } else {
                        x = hm!(i, i + 1);
                        y = hm!(i + 1, i);
                        q = (d[i as usize] - p) * (d[i as usize] - p) + e[i as usize] * e[i as usize];
                        t = (x * s - z * r) / q;
                        hm!(i, n) = t;
                        hm!(i + 1, n) = if x.abs() > z.abs() { (-r - w * t) / x } else { (-s - y * t) / z };
                    }
                    t = hm!(i, n).abs();
                    if (EPS * t) * t > 1.0 {
                        for j in i..=n {
                            hm!(j, n) /= t;
                        }
                    }
                }
                i -= 1;
            }
        } else if q < 0.0 {
            let mut l = n - 1;
            if hm!(n, n - 1).abs() > hm!(n - 1, n).abs() {
                hm!(n - 1, n - 1) = q / hm!(n, n - 1);
                hm!(n - 1, n) = -(hm!(n, n) - p) / hm!(n, n - 1);
            } else {
                let (cr, ci) = cdiv(0.0, -hm!(n - 1, n), hm!(n - 1, n - 1) - p, q);
                hm!(n - 1, n - 1) = cr;
                hm!(n - 1, n) = ci;
            }
            hm!(n, n - 1) = 0.0;
            hm!(n, n) = 1.0;
            let mut i = n - 2;
            while i >= 0 {
                let mut ra = 0.0;
                let mut sa = 0.0;
                for j in l..=n {
                    ra += hm!(i, j) * hm!(j, n - 1);
                    sa += hm!(i, j) * hm!(j, n);
                }
                w = hm!(i, i) - p;
                if e[i as usize] < 0.0 {
                    z = w;
                    r = ra;
                    s = sa;
                } else {
                    l = i;
                    if e[i as usize] == 0.0 {
                        let (cr, ci) = cdiv(-ra, -sa, w, q);
                        hm!(i, n - 1) = cr;
                        hm!(i, n) = ci;
                    } else {
                        x = hm!(i, i + 1);
                        y = hm!(i + 1, i);
                        let di = d[i as usize] - p;
                        let ei = e[i as usize];
                        let mut vr = di * di + ei * ei - q * q;
                        let vi = di * 2.0 * q;
                        if vr == 0.0 && vi == 0.0 {
                            vr = EPS * norm * (w.abs() + q.abs() + x.abs() + y.abs() + z.abs());
                        }
                        let (cr, ci) =
                            cdiv(x * r - z * ra + q * sa, x * s - z * sa - q * ra, vr, vi);
                        hm!(i, n - 1) = cr;
                        hm!(i, n) = ci;
                        if x.abs() > z.abs() + q.abs() {
                            hm!(i + 1, n - 1) = (-ra - w * hm!(i, n - 1) + q * hm!(i, n)) / x;
                            hm!(i + 1, n) = (-sa - w * hm!(i, n) - q * hm!(i, n - 1)) / x;
                        } else {
                            let (cr, ci) =
                                cdiv(-r - y * hm!(i, n - 1), -s - y * hm!(i, n), z, q);
                            hm!(i + 1, n - 1) = cr;
                            hm!(i + 1, n) = ci;
                        }
                    }
                    t = hm!(i, n - 1).abs().max(hm!(i, n).abs());
                    if (EPS * t) * t > 1.0 {
                        for j in i..=n {
                            hm!(j, n - 1) /= t;
                            hm!(j, n) /= t;
                        }
                    }
                }
                i -= 1;
            }
        }
    }

    for j in (low..nn).rev() {
        for i in low..=high {
            let mut acc = 0.0;
            for k in low..=j.min(high) {
                acc += vm!(i, k) * hm!(k, j);
            }
            vm!(i, j) = acc;
        }
    }
    Ok(())
}

/// Eigenvalues and unit right eigenvectors of a real square matrix.
pub fn eig_real(a: &DMatrix<f64>) -> Result<RealEigen> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Dimension { expected: n, got: a.ncols() });
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::Parameter("matrix has non-finite entries".into()));
    }
    if n == 0 {
        return Ok(RealEigen { values: vec![], vectors: vec![] });
    }
    let mut h: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| a[(i, j)]).collect()).collect();
    let scale = balance(&mut h);
    let mut v = vec![vec![0.0; n]; n];
    orthes(&mut h, &mut v);
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    hqr2(&mut h, &mut v, &mut d, &mut e)?;

    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    let mut j = 0;
    while j < n {
        if e[j] == 0.0 {
            values.push(Complex64::new(d[j], 0.0));
            vectors.push((0..n).map(|i| Complex64::new(v[i][j] * scale[i], 0.0)).collect());
            j += 1;
        } else {
            let lam = Complex64::new(d[j], e[j]);
            let vec: Vec<Complex64> =
                (0..n).map(|i| Complex64::new(v[i][j], v[i][j + 1]) * scale[i]).collect();
            values.push(lam);
            values.push(lam.conj());
            let conj = vec.iter().map(|z| z.conj()).collect();
            vectors.push(vec);
            vectors.push(conj);
            j += 2;
        }
    }
    for vec in vectors.iter_mut() {
        let norm = vec.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            vec.iter_mut().for_each(|z| *z /= norm);
        }
    }
    Ok(RealEigen { values, vectors })
}

/// Eigenpairs of a complex matrix; vectors have unit 2-norm.
#[derive(Debug, Clone)]
pub struct ComplexEigen {
    pub values: Vec<Complex64>,
    pub vectors: Vec<Vec<Complex64>>,
}

fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

fn balance_complex(a: &mut [Vec<Complex64>]) -> Vec<f64> {
    let n = a.len();
    let mut d = vec![1.0; n];
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += cabs1(a[j][i]);
                    r += cabs1(a[i][j]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let (mut c2, r2) = (c, r / 2.0);
            while c2 < r2 {
                f *= 2.0;
                c2 *= 4.0;
            }
            let r2 = r * 2.0;
            while c2 >= r2 {
                f /= 2.0;
                c2 /= 4.0;
            }
            if (c * f + r / f) / s < 0.95 {
                done = false;
                d[i] *= f;
                for j in 0..n {
                    a[i][j] /= f;
                    a[j][i] *= f;
                }
            }
        }
    }
    d
}

/// Unitary reduction to upper Hessenberg form; q accumulates the transformation.
fn hessenberg_complex(h: &mut [Vec<Complex64>], q: &mut [Vec<Complex64>]) {
    let n = h.len();
    for (i, row) in q.iter_mut().enumerate() {
        row.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        row[i] = Complex64::new(1.0, 0.0);
    }
    for m in 1..n.saturating_sub(1) {
        let alpha = (m..n).map(|i| h[i][m - 1].norm_sqr()).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let x0 = h[m][m - 1];
        let phase = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let mut u: Vec<Complex64> = (m..n).map(|i| h[i][m - 1]).collect();
        u[0] += phase * alpha;
        let un = u.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if un == 0.0 {
            continue;
        }
        // H <- (I - 2uu*/u*u) H (I - 2uu*/u*u)
        for j in 0..n {
            let s: Complex64 = (m..n).map(|i| u[i - m].conj() * h[i][j]).sum::<Complex64>() * (2.0 / un);
            for i in m..n {
                h[i][j] -= u[i - m] * s;
            }
        }
        for row in h.iter_mut() {
            let s: Complex64 = (m..n).map(|j| row[j] * u[j - m]).sum::<Complex64>() * (2.0 / un);
            for j in m..n {
                row[j] -= s * u[j - m].conj();
            }
        }
        for row in q.iter_mut() {
            let s: Complex64 = (m..n).map(|j| row[j] * u[j - m]).sum::<Complex64>() * (2.0 / un);
            for j in m..n {
                row[j] -= s * u[j - m].conj();
            }
        }
        for i in m + 1..n {
            h[i][m - 1] = Complex64::new(0.0, 0.0);
        }
    }
}

/// (c, s) with [[c, s], [-s̄, c]] (a, b)ᵀ = (r, 0)ᵀ.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if r == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if a.norm() == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let an = a.norm();
    (an / r, (a / an) * b.conj() / r)
}

/// Shifted QR on a Hessenberg matrix down to upper triangular (complex Schur) form.
fn schur_complex(h: &mut [Vec<Complex64>], q: &mut [Vec<Complex64>], full: bool) -> Result<()> {
    let n = h.len();
    let norm = h.iter().flatten().map(|z| cabs1(*z)).sum::<f64>().max(f64::MIN_POSITIVE);
    let mut hi = n as i64 - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let cap = 60 * n + 100;
    while hi >= 0 {
        let hu = hi as usize;
        let mut l = hu;
        while l > 0 {
            let s = cabs1(h[l - 1][l - 1]) + cabs1(h[l][l]);
            let s = if s == 0.0 { norm } else { s };
            if cabs1(h[l][l - 1]) < EPS * s {
                h[l][l - 1] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hu {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > cap {
            return Err(Error::NoConvergence);
        }
        let mu = if iter % 10 == 0 {
            h[hu][hu] + Complex64::new(0.75 * h[hu][hu - 1].norm(), 0.0)
        } else {
            let a = h[hu - 1][hu - 1];
            let b = h[hu - 1][hu];
            let c = h[hu][hu - 1];
            let d = h[hu][hu];
            let tr = 0.5 * (a + d);
            let disc = (0.25 * (a - d) * (a - d) + b * c).sqrt();
            let (r1, r2) = (tr + disc, tr - disc);
            if (r1 - d).norm() <= (r2 - d).norm() { r1 } else { r2 }
        };
        let mut x = h[l][l] - mu;
        let mut y = h[l + 1][l];
        for k in l..hu {
            let (c, s) = givens(x, y);
            let j0 = if k > l { k - 1 } else { l };
            let j1 = if full { n } else { hu + 1 };
            for j in j0..j1 {
                let (a, b) = (h[k][j], h[k + 1][j]);
                h[k][j] = c * a + s * b;
                h[k + 1][j] = -s.conj() * a + c * b;
            }
            let i1 = (k + 2).min(hu);
            let i0 = if full { 0 } else { l };
            for row in h.iter_mut().take(i1 + 1).skip(i0) {
                let (a, b) = (row[k], row[k + 1]);
                row[k] = c * a + s.conj() * b;
                row[k + 1] = -s * a + c * b;
            }
            if full {
                for row in q.iter_mut() {
                    let (a, b) = (row[k], row[k + 1]);
                    row[k] = c * a + s.conj() * b;
                    row[k + 1] = -s * a + c * b;
                }
            }
            if k + 1 < hu {
                x = h[k + 1][k];
                y = h[k + 2][k];
            }
        }
    }
    Ok(())
}

/// Eigenvalues only of a complex square matrix.
pub fn eigenvalues_complex(a: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Dimension { expected: n, got: a.ncols() });
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Parameter("matrix has non-finite entries".into()));
    }
    let mut h: Vec<Vec<Complex64>> = (0..n).map(|i| (0..n).map(|j| a[(i, j)]).collect()).collect();
    balance_complex(&mut h);
    let mut q = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    hessenberg_complex(&mut h, &mut q);
    schur_complex(&mut h, &mut q, false)?;
    Ok((0..n).map(|i| h[i][i]).collect())
}

/// Eigenvalues and unit right eigenvectors of a complex square matrix.
pub fn eig_complex(a: &DMatrix<Complex64>) -> Result<ComplexEigen> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Dimension { expected: n, got: a.ncols() });
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Parameter("matrix has non-finite entries".into()));
    }
    let mut h: Vec<Vec<Complex64>> = (0..n).map(|i| (0..n).map(|j| a[(i, j)]).collect()).collect();
    let scale = balance_complex(&mut h);
    let mut q = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    hessenberg_complex(&mut h, &mut q);
    schur_complex(&mut h, &mut q, true)?;
    let tnorm = h.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let small = EPS * tnorm;
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for k in 0..n {
        let lam = h[k][k];
        let mut y = vec![Complex64::new(0.0, 0.0); k + 1];
        y[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let s: Complex64 = (i + 1..=k).map(|j| h[i][j] * y[j]).sum();
            let mut d = h[i][i] - lam;
            if d.norm() < small {
                d = Complex64::new(small, 0.0);
            }
            y[i] = -s / d;
            let big = y[i].norm();
            if big > 1e100 {
                y.iter_mut().for_each(|z| *z /= big);
            }
        }
        let mut v: Vec<Complex64> = (0..n)
            .map(|i| (0..=k).map(|j| q[i][j] * y[j]).sum::<Complex64>() * scale[i])
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|z| *z /= norm);
        }
        values.push(lam);
        vectors.push(v);
    }
    Ok(ComplexEigen { values, vectors })
}
