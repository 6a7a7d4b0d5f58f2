use fhspec::eigen::eigenvalues_complex;
use fhspec::freeprob::{classical_approximation_samples, compare_dos, sample_haar_orthogonal, DEFAULT_BINS};
use fhspec::rng::{normals, substream};
use fhspec::spectral::{eig_full, Spectrum};
use fhspec::toeplitz::{build_toeplitz, ToeplitzMatrix};
use fhspec::{Complex64, SymbolParams};
use nalgebra::DMatrix;
use rand::seq::SliceRandom;

fn working(n: usize) -> (ToeplitzMatrix, Spectrum) {
    let t = build_toeplitz(SymbolParams::working(), n).unwrap();
    let s = eig_full(&t.entries).unwrap();
    (t, s)
}

fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

#[test]
fn haar_trace_identity() {
    let n = 6;
    let mut rng = substream(1, "fixed", 0);
    let a = DMatrix::from_vec(n, n, normals(&mut rng, n * n));
    let b = DMatrix::from_vec(n, n, normals(&mut rng, n * n));
    let target = a.trace() * b.trace() / n as f64;
    let draws = 20_000;
    let (mut sum, mut sq, mut q11) = (0.0, 0.0, 0.0);
    for d in 0..draws {
        let q = sample_haar_orthogonal(n, &mut substream(2, "haar-test", d));
        let x = (&q * &a * q.transpose() * &b).trace();
        sum += x;
        sq += x * x;
        q11 += q[(0, 0)].powi(2);
    }
    let m = draws as f64;
    let mean = sum / m;
    let se = ((sq / m - mean * mean) / m).sqrt();
    assert!((mean - target).abs() <= 4.0 * se, "{mean} vs {target} (se {se})");
    // Q11² ~ Beta(1/2, (n-1)/2), mean 1/n, sd below 1/n
    assert!((q11 / m - 1.0 / n as f64).abs() < 4.0 / (n as f64 * m.sqrt()));
}

#[test]
fn classical_model_equals_explicit_permuted_matrix() {
    let (_, s) = working(16);
    let (sigma, seed, trials) = (0.7, 8, 5);
    let pooled = classical_approximation_samples(&s, sigma, trials, seed).unwrap();
    assert_eq!(pooled.failures, 0);
    for t in 0..trials {
        let mut perm: Vec<usize> = (0..16).collect();
        perm.shuffle(&mut substream(seed, "permutation", t as u64));
        let v = normals(&mut substream(seed, "disorder", t as u64), 16);
        // Π⁻¹ΛΠ with (Π x)_{perm[i]} = x_i
        let pi = DMatrix::from_fn(16, 16, |r, c| if perm[c] == r { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
        let lambda = DMatrix::from_fn(16, 16, |r, c| if r == c { s.eigenvalues[r] } else { Complex64::new(0.0, 0.0) });
        let mut m = pi.transpose() * lambda * &pi;
        for i in 0..16 {
            m[(i, i)] += sigma * v[i];
        }
        let explicit = sorted(eigenvalues_complex(&m).unwrap());
        let fast = sorted(pooled.values[16 * t..16 * (t + 1)].to_vec());
        for (a, b) in explicit.iter().zip(&fast) {
            assert!((a - b).norm() < 1e-12, "trial {t}: {a} vs {b}");
        }
    }
}

#[test]
fn zero_disorder_histograms_coincide() {
    let (t, s) = working(64);
    let c = compare_dos(&t, &s, 0.0, 4, 3, DEFAULT_BINS).unwrap();
    for axis in [&c.re, &c.im] {
        assert_eq!(axis.free.mass, axis.exact.mass);
        assert_eq!(axis.classical.mass, axis.exact.mass);
        assert_eq!(axis.distance_free, 0.0);
        assert_eq!(axis.distance_classical, 0.0);
    }
}

#[test]
fn free_model_wins_on_the_imaginary_axis_at_strong_disorder() {
    let (t, s) = working(160);
    for sigma in [1.0, 2.0] {
        let c = compare_dos(&t, &s, sigma, 50, 42, DEFAULT_BINS).unwrap();
        assert!(c.im.distance_free < c.im.distance_classical, "sigma {sigma}: {} vs {}", c.im.distance_free, c.im.distance_classical);
        assert!(c.re.distance_free < c.re.distance_classical);
    }
}

#[test]
#[ignore = "fails: classical Im distance is about 12x the free one at sigma 0.1"]
fn weak_disorder_imaginary_axis() {
    let (t, s) = working(160);
    let c = compare_dos(&t, &s, 0.1, 50, 42, DEFAULT_BINS).unwrap();
    let (f, k) = (c.im.distance_free, c.im.distance_classical);
    println!("sigma 0.1 Im: free {f:.4}, classical {k:.4}");
    // a real V leaves the imaginary parts of the classical model untouched, so its
    // Im marginal is the unperturbed one, already off by the compression at σ = 0.1
    assert!(f.max(k) <= 2.0 * f.min(k), "free {f} classical {k}");
}
