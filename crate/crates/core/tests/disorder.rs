use fhspec::disorder::{archetypes, compression_profile, draw_disorder, linear_grid, sigma_sweep, ClassKind, SigmaSweep};
use fhspec::localization::{decay_profile, ipr, normalized, rank_correlation, shannon_entropy, DecayClass};
use fhspec::SymbolParams;
use std::sync::OnceLock;

const N: usize = 160;

fn working_sweep() -> &'static SigmaSweep {
    static SWEEP: OnceLock<SigmaSweep> = OnceLock::new();
    SWEEP.get_or_init(|| sigma_sweep(SymbolParams::working(), N, draw_disorder(42, N, false), &linear_grid(0.5, 51), 42).unwrap())
}

#[test]
fn labels_are_exhaustive() {
    let s = working_sweep();
    assert_eq!(s.labels.len(), N);
    let total: usize = [ClassKind::Bulk, ClassKind::RunawayI, ClassKind::RunawayII].iter().map(|&k| s.count(k)).sum();
    assert_eq!(total, N);
    assert!(s.count(ClassKind::RunawayI) >= 2);
    assert!(s.count(ClassKind::RunawayII) >= 1);
}

#[test]
fn type_one_ends_real_and_better_conditioned() {
    let s = working_sweep();
    let last = s.sigma_grid().len() - 1;
    let tol = s.thresholds.eps_real * s.diameter;
    for l in s.indices(ClassKind::RunawayI) {
        let e = s.trajectories.values[last][l];
        assert!(e.im.abs() <= tol, "{l}: {e}");
        let kp = s.trajectories.kappa_path(l);
        let peak = kp.iter().copied().fold(0.0, f64::max);
        let sc = s.labels[l].collision_sigma.unwrap();
        assert!(sc > 0.0 && sc <= 0.5);
        assert!(kp[last] < peak, "{l}");
        // κ diverges at the collision itself, so only pairs well past it are compared
        if sc <= 0.45 {
            assert!(kp[last] < kp[0], "{l}: kappa {} -> {}", kp[0], kp[last]);
        }
    }
    // collisions come in conjugate pairs
    for l in s.indices(ClassKind::RunawayI) {
        assert_eq!(s.labels[N - 1 - l].kind, ClassKind::RunawayI);
    }
}

#[test]
fn type_one_sits_at_the_middle_of_the_spectrum() {
    let s = working_sweep();
    for l in s.indices(ClassKind::RunawayI) {
        assert!((70..90).contains(&l), "{l}");
    }
}

#[test]
fn displacement_bound_on_the_whole_grid() {
    let s = working_sweep();
    let tr = &s.trajectories;
    for (k, &sigma) in s.sigma_grid().iter().enumerate() {
        for l in 0..N {
            let d = (tr.values[k][l] - tr.values[0][l]).norm();
            assert!(d <= sigma * s.v.norm() * tr.kappa[0][l] + 1e-12, "sigma {sigma}, {l}");
        }
    }
}

#[test]
fn paths_are_continuous() {
    let s = working_sweep();
    let step = s.sigma_grid()[1];
    let bound = step * s.v.v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tr = &s.trajectories;
    for k in 1..tr.values.len() {
        for l in 0..N {
            let d = (tr.values[k][l] - tr.values[k - 1][l]).norm();
            // |dE/dσ| ≤ max|v|·κ, with κ taken as the larger end
            let kappa = tr.kappa[k][l].max(tr.kappa[k - 1][l]);
            assert!(d <= bound * kappa, "step {k}, path {l}: {d}");
        }
    }
    assert!(tr.max_step() < 0.1 * s.diameter, "{}", tr.max_step());
}

#[test]
fn imaginary_compression_and_real_stretch() {
    let s = working_sweep();
    let prof = compression_profile(s);
    // small wiggles from bulk paths grazing one another are allowed
    let tol = 1e-3 * s.diameter;
    for w in prof.windows(2) {
        assert!(w[1].1 <= w[0].1 + tol, "mean |Im| rises at sigma {}: {} -> {}", w[1].0, w[0].1, w[1].1);
        assert!(w[1].2 >= w[0].2 - tol, "real spread shrinks at sigma {}", w[1].0);
    }
    let (first, last) = (prof[0], prof[prof.len() - 1]);
    assert!(last.1 < 0.9 * first.1 && last.2 > first.2);
}

#[test]
fn bulk_follows_second_order_at_small_disorder() {
    let s = sigma_sweep(SymbolParams::working(), N, draw_disorder(42, N, false), &linear_grid(0.3, 31), 42).unwrap();
    let mut err: Vec<f64> = s.indices(ClassKind::Bulk).iter().map(|&l| s.labels[l].pred_error).collect();
    err.sort_by(f64::total_cmp);
    assert!(err[err.len() / 2] <= 0.05, "{}", err[err.len() / 2]);
}

#[test]
fn complex_disorder_has_no_collisions() {
    let s = sigma_sweep(SymbolParams::working(), N, draw_disorder(42, N, true), &linear_grid(0.5, 51), 42).unwrap();
    assert!(s.count(ClassKind::RunawayI) <= 1, "{}", s.count(ClassKind::RunawayI));
    // mirror symmetry of the motion is gone
    let last = s.sigma_grid().len() - 1;
    let defect = s.spectra[last].conjugation_defect();
    assert!(defect > 1e-3 * s.diameter, "{defect}");
    let real = working_sweep();
    let defect = real.spectra[last].conjugation_defect();
    assert!(defect < 1e-8 * real.diameter, "{defect}");
}

#[test]
fn symmetric_matrix_sweep_has_no_collisions() {
    let p = SymbolParams::new(0.25, 0.0).unwrap();
    let s = sigma_sweep(p, 32, draw_disorder(5, 32, false), &linear_grid(0.5, 11), 5).unwrap();
    assert_eq!(s.count(ClassKind::RunawayI), 0);
}

#[test]
fn localization_bounds_on_every_vector() {
    let s = working_sweep();
    let hmax = (N as f64).log2();
    for spec in &s.spectra {
        for v in spec.right.iter().chain(&spec.left) {
            let u = normalized(v);
            let h = shannon_entropy(&u).unwrap();
            let p = ipr(&u).unwrap();
            assert!((0.0..=hmax + 1e-12).contains(&h));
            assert!(p >= 1.0 / N as f64 - 1e-15 && p <= 1.0 + 1e-15);
        }
    }
}

#[test]
fn type_one_archetype_peaks_inside() {
    let s = working_sweep();
    let l = archetypes(s).runaway_i.unwrap();
    let last = s.sigma_grid().len() - 1;
    let p = decay_profile(&normalized(s.eigenpair(last, l).1)).unwrap();
    assert_eq!(p.decay_class, DecayClass::AlgebraicInterior);
    assert!(p.argmax_index >= N / 10 && p.argmax_index < N - N / 10);
}

#[test]
fn condition_number_tracks_localization() {
    let s = working_sweep();
    let last = s.sigma_grid().len() - 1;
    let kappa = &s.trajectories.kappa[last];
    let iprs: Vec<f64> = (0..N).map(|l| ipr(&normalized(s.eigenpair(last, l).1)).unwrap()).collect();
    let rho = rank_correlation(kappa, &iprs);
    println!("rank correlation {rho:.3}");
    assert!(rho > 0.0);
}
