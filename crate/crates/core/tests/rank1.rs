use fhspec::rank1::{rank1_root_check, resolvent_entry, resolvent_entry_direct, runaway_census, Family, RankOnePerturbation};
use fhspec::spectral::eig_full;
use fhspec::symbol::{asymptotic_eigenvalue, polyline_winding, winding_number};
use fhspec::toeplitz::build_toeplitz;
use fhspec::{Complex64, SymbolParams};
use proptest::prelude::*;

fn working() -> SymbolParams {
    SymbolParams::new(1.0 / 3.0, -0.5).unwrap()
}

#[test]
fn spectral_sum_matches_dense_solve() {
    let t = build_toeplitz(working(), 8).unwrap();
    let spec = eig_full(&t.entries).unwrap();
    for (lam, k, j) in [(Complex64::new(0.3, 0.7), 2, 5), (Complex64::new(-1.0, 0.1), 0, 7), (Complex64::new(2.5, -0.4), 4, 4)] {
        let a = resolvent_entry(&spec, lam, k, j).unwrap();
        let b = resolvent_entry_direct(&t.entries, lam, k, j).unwrap();
        assert!((a - b).norm() <= 1e-8 * b.norm().max(1e-3), "{a} {b}");
    }
}

#[test]
fn resolvent_decays_and_is_real_on_the_real_axis() {
    let t = build_toeplitz(working(), 16).unwrap();
    let spec = eig_full(&t.entries).unwrap();
    let far = resolvent_entry(&spec, Complex64::new(1e6, 1e6), 3, 3).unwrap();
    assert!(far.norm() < 1e-5);
    let left = resolvent_entry(&spec, Complex64::new(-10.0, 0.0), 3, 3).unwrap();
    assert!(left.im.abs() < 1e-12 * left.norm());
    assert!(resolvent_entry(&spec, spec.eigenvalues[2], 0, 0).is_err());
}

#[test]
fn a55_roots_satisfy_the_resolvent_condition() {
    let t = build_toeplitz(working(), 160).unwrap();
    let spec = eig_full(&t.entries).unwrap();
    let pert = RankOnePerturbation { j: 4, k: 4, sigma: 0.5 };
    let perturbed = eig_full(&pert.apply(&t.entries).unwrap()).unwrap();
    let res = rank1_root_check(&spec, pert, &perturbed.eigenvalues);
    let worst = res.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
    assert!(res.iter().all(|r| r.is_some()));
    assert!(worst <= 1e-6 / pert.sigma, "worst residual {worst}");
}

#[test]
fn thirteen_curve_winds_like_the_symbol() {
    for (a, b) in [(1.0 / 3.0, -0.5), (0.25, 0.3), (0.0, 1.0)] {
        let p = SymbolParams::new(a, b).unwrap();
        let n = 160;
        let curve: Vec<Complex64> = (0..n).map(|l| asymptotic_eigenvalue(p, n, l)).collect();
        let centre = curve.iter().sum::<Complex64>() / n as f64;
        let nu = winding_number(p, centre, 4096).unwrap();
        assert_eq!(polyline_winding(&curve, centre), -nu, "alpha {a} beta {b}");
    }
}

fn det4(m: &[[Complex64; 4]; 4]) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    let mut perm = [0usize, 1, 2, 3];
    fn heap(k: usize, perm: &mut [usize; 4], m: &[[Complex64; 4]; 4], total: &mut Complex64) {
        if k == 1 {
            let mut inv = 0;
            for a in 0..4 {
                for b in a + 1..4 {
                    if perm[a] > perm[b] {
                        inv += 1;
                    }
                }
            }
            let mut p = Complex64::new(if inv % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
            for (r, &c) in perm.iter().enumerate() {
                p *= m[r][c];
            }
            *total += p;
            return;
        }
        for i in 0..k {
            heap(k - 1, perm, m, total);
            if k % 2 == 0 { perm.swap(i, k - 1) } else { perm.swap(0, k - 1) }
        }
    }
    heap(4, &mut perm, m, &mut total);
    total
}

fn shifted(t: &nalgebra::DMatrix<f64>, lam: Complex64, extra: Option<(usize, usize, f64)>) -> [[Complex64; 4]; 4] {
    let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            m[r][c] = Complex64::new(t[(r, c)], 0.0);
        }
        m[r][r] -= lam;
    }
    if let Some((j, k, s)) = extra {
        m[j][k] += s;
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn spectral_sum_equals_direct_solve(re in -2.0..4.0f64, im in -2.0..2.0f64, j in 0usize..24, k in 0usize..24) {
        let t = build_toeplitz(working(), 24).unwrap();
        let spec = eig_full(&t.entries).unwrap();
        let lam = Complex64::new(re, im);
        prop_assume!(spec.eigenvalues.iter().all(|e| (e - lam).norm() > 1e-3));
        let a = resolvent_entry(&spec, lam, k, j).unwrap();
        let b = resolvent_entry_direct(&t.entries, lam, k, j).unwrap();
        prop_assert!((a - b).norm() <= 1e-6 * b.norm().max(1e-6));
    }

    #[test]
    fn matrix_determinant_lemma(re in -1.0..3.0f64, im in -1.0..1.0f64, j in 0usize..4, k in 0usize..4, s in -3.0..3.0f64) {
        let t = build_toeplitz(working(), 4).unwrap();
        let spec = eig_full(&t.entries).unwrap();
        let lam = Complex64::new(re, im);
        prop_assume!(spec.eigenvalues.iter().all(|e| (e - lam).norm() > 1e-3));
        let r = resolvent_entry(&spec, lam, k, j).unwrap();
        let lhs = det4(&shifted(&t.entries, lam, Some((j, k, s))));
        let rhs = det4(&shifted(&t.entries, lam, None)) * (1.0 + s * r);
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + lhs.norm()));
    }
}

#[test]
fn census_is_deterministic() {
    let a = runaway_census(working(), 48, Family::Diagonal, 2, 5.0, 16).unwrap();
    let b = runaway_census(working(), 48, Family::Diagonal, 2, 5.0, 16).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert!(a.count_type_ii <= a.n && a.count_real_collisions <= a.n);
    assert!(runaway_census(working(), 48, Family::Diagonal, 24, 5.0, 16).is_err());
}

#[test]
fn a66_runaways_match_the_winding() {
    let c = runaway_census(SymbolParams::working(), 160, Family::Diagonal, 6, 20.0, 64).unwrap();
    assert_eq!(c.winding_of_e1, Some(c.count_type_ii as i32));
    assert_eq!(c.count_type_ii, 6);
}
