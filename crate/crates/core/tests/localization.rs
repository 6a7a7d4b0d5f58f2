use fhspec::localization::{decay_profile, ipr, normalized, shannon_entropy, DecayClass};
use fhspec::spectral::{eig_full, order_by_momentum};
use fhspec::symbol::asymptotic_right_eigenvector;
use fhspec::toeplitz::build_toeplitz;
use fhspec::{Complex64, SymbolParams};
use proptest::prelude::*;

/// IPR and entropy of |ψ_j|² ∝ q^{2j}, j < n, summed in closed form.
fn geometric(q: f64, n: usize) -> (f64, f64) {
    let (r, nf) = (q * q, n as f64);
    let s1 = (1.0 - r.powf(nf)) / (1.0 - r);
    let s2 = (1.0 - r.powf(2.0 * nf)) / (1.0 - r * r);
    // Σ_{j<n} j r^j
    let sj = r * (1.0 - nf * r.powf(nf - 1.0) + (nf - 1.0) * r.powf(nf)) / (1.0 - r).powi(2);
    let ipr = s2 / (s1 * s1);
    // H = log₂ S1 - log₂(r) Σ j r^j / S1
    let h = s1.log2() - r.log2() * sj / s1;
    (ipr, h)
}

#[test]
fn geometric_profile_closed_form() {
    let p = SymbolParams::working();
    for n in [64, 160, 400] {
        for ell in [5, n / 3, n / 2] {
            let v = normalized(&asymptotic_right_eigenvector(p, n, ell));
            let q = (-p.decay() * (n as f64).ln() / n as f64).exp();
            let (i, h) = geometric(q, n);
            assert!((ipr(&v).unwrap() - i).abs() < 1e-10, "n {n} ell {ell}");
            assert!((shannon_entropy(&v).unwrap() - h).abs() < 1e-10, "n {n} ell {ell}");
            let prof = decay_profile(&v).unwrap();
            assert_eq!(prof.decay_class, DecayClass::ExponentialBoundary);
            assert_eq!(prof.argmax_index, 0);
            let rate = -q.ln();
            assert!((prof.fit_rates.exp_rate / rate - 1.0).abs() < 1e-8, "{} vs {rate}", prof.fit_rates.exp_rate);
        }
    }
}

#[test]
fn conjugate_eigenvectors_share_entropy() {
    let p = SymbolParams::working();
    let n = 160;
    let t = build_toeplitz(p, n).unwrap();
    let s = order_by_momentum(eig_full(&t.entries).unwrap(), p).unwrap();
    for l in 0..n {
        let a = shannon_entropy(&normalized(&s.right[l])).unwrap();
        let b = shannon_entropy(&normalized(&s.right[n - 1 - l])).unwrap();
        assert!((a - b).abs() < 1e-8, "{l}: {a} vs {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropy_and_ipr_bounds(raw in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 2..200)) {
        prop_assume!(raw.iter().any(|&(a, b)| a != 0.0 || b != 0.0));
        let v: Vec<Complex64> = raw.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        let u = normalized(&v);
        let n = u.len() as f64;
        let h = shannon_entropy(&u).unwrap();
        let p = ipr(&u).unwrap();
        prop_assert!(h >= 0.0 && h <= n.log2() + 1e-12);
        prop_assert!(p >= 1.0 / n - 1e-15 && p <= 1.0 + 1e-15);
        // Rényi-2 never exceeds Shannon
        prop_assert!(-p.log2() <= h + 1e-9);
    }
}
