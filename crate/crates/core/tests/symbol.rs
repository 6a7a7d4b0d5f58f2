use fhspec::special::gamma;
use fhspec::symbol::{eval_symbol, fourier_coefficient, invert_symbol, winding_number, SymbolParams};
use fhspec::Complex64;
use proptest::prelude::*;
use std::f64::consts::{PI, TAU};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn simpson<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, fa: Complex64, fm: Complex64, fb: Complex64, tol: f64, depth: u32) -> Complex64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (f(0.5 * (a + m)), f(0.5 * (m + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let left = (m - a) / 6.0 * (fa + 4.0 * lm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * rm + fb);
    if depth == 0 || (left + right - whole).norm() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson(f, a, m, fa, lm, fm, tol / 2.0, depth - 1) + simpson(f, m, b, fm, rm, fb, tol / 2.0, depth - 1)
}

/// (1/2π) ∫ e^{irp} a(e^{-ip}) dp over (0, 2π), split into 64 panels.
fn quadrature_coefficient(params: SymbolParams, r: i64) -> Complex64 {
    let f = |p: f64| {
        if p <= 0.0 || p >= TAU {
            return c(0.0, 0.0);
        }
        c(0.0, r as f64 * p).exp() * eval_symbol(params, c(p, 0.0)).unwrap()
    };
    let panels = 64;
    let h = TAU / panels as f64;
    let mut acc = c(0.0, 0.0);
    for k in 0..panels {
        let (a, b) = (k as f64 * h, (k + 1) as f64 * h);
        acc += simpson(&f, a, b, f(a), f(0.5 * (a + b)), f(b), 1e-13, 40);
    }
    acc / TAU
}

#[test]
fn coefficients_match_quadrature() {
    let p = SymbolParams::working();
    for r in -64..=64 {
        let q = quadrature_coefficient(p, r);
        assert!(q.im.abs() < 1e-9, "r = {r}: imaginary part {}", q.im);
        assert!((fourier_coefficient(p, r) - q.re).abs() < 1e-9, "r = {r}: {} vs {}", fourier_coefficient(p, r), q.re);
    }
}

#[test]
fn coefficient_tail_law() {
    let p = SymbolParams::working();
    let limit_plus = gamma(2.0 * p.alpha + 1.0) * (PI * (p.alpha + p.beta)).sin().abs() / PI;
    let limit_minus = gamma(2.0 * p.alpha + 1.0) * (PI * (p.alpha - p.beta)).sin().abs() / PI;
    for r in [1000i64, 2000, 5000, 20000] {
        for (s, limit) in [(r, limit_minus), (-r, limit_plus)] {
            let scaled = fourier_coefficient(p, s).abs() * (r as f64).powf(2.0 * p.alpha + 1.0);
            assert!((scaled / limit - 1.0).abs() < 0.02, "r = {s}: {scaled} vs {limit}");
        }
    }
}

#[test]
fn winding_stable_under_refinement() {
    let p = SymbolParams::working();
    for z in [c(0.5, 0.0), c(1.2, 0.3), c(0.8, -0.5), c(3.0, 0.0), c(-1.0, 0.2)] {
        let w = winding_number(p, z, 512).unwrap();
        for grid in [1024, 4096, 16384] {
            assert_eq!(winding_number(p, z, grid).unwrap(), w, "{z} at {grid}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn inversion_round_trip(re in 0.3..(TAU - 0.3), im in -0.2..0.2f64) {
        let params = SymbolParams::working();
        let p = c(re, im);
        let e = eval_symbol(params, p).unwrap();
        let guess = p + c(0.01, -0.005);
        let m = invert_symbol(params, e, guess).unwrap();
        prop_assert!((m.p.re - re).abs() < 1e-8 && (m.p.im - im).abs() < 1e-8, "{p} -> {}", m.p);
    }

    #[test]
    fn conjugate_symmetry(re in 0.01..(TAU - 0.01), im in -0.5..0.5f64, alpha in 0.0..1.5f64, beta in -1.0..1.0f64) {
        let params = SymbolParams::new(alpha, beta).unwrap();
        let a = eval_symbol(params, c(re, im)).unwrap();
        let b = eval_symbol(params, c(TAU - re, im)).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-12 * (1.0 + a.norm()));
    }
}
