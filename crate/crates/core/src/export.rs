//! CSV / JSON / binary writers for every data product.

use crate::disorder::SigmaSweep;
use crate::error::Result;
use crate::freeprob::DosHistogram;
use crate::localization::LocalizationProfile;
use crate::perturbation::PerturbationReport;
use crate::rank1::RunawayCensus;
use crate::spectral::Spectrum;
use crate::toeplitz::ToeplitzMatrix;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use std::io::Write;

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

/// Row-major entries, one matrix row per line.
pub fn write_matrix_csv<W: Write>(w: W, t: &ToeplitzMatrix) -> Result<()> {
    let mut out = csv_writer(w);
    for i in 0..t.n {
        out.write_record((0..t.n).map(|j| fmt(t.entries[(i, j)])))?;
    }
    out.flush()?;
    Ok(())
}

pub fn matrix_sidecar(t: &ToeplitzMatrix) -> serde_json::Value {
    json!({ "n": t.n, "alpha": t.params.alpha, "beta": t.params.beta })
}

pub const SPECTRUM_HEADER: [&str; 7] = ["order_index", "re_e", "im_e", "re_p", "im_p", "kappa", "abs_c"];

/// One row per eigenpair; momentum columns are empty when not computed.
pub fn write_spectrum_csv<W: Write>(w: W, spec: &Spectrum) -> Result<()> {
    write_spectrum_rows(w, spec, &(0..spec.n).collect::<Vec<_>>())
}

/// As [`write_spectrum_csv`], row ℓ holding the pair at position `index[ℓ]`.
pub fn write_spectrum_rows<W: Write>(w: W, spec: &Spectrum, index: &[usize]) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(SPECTRUM_HEADER)?;
    for (l, &i) in index.iter().enumerate() {
        let e = spec.eigenvalues[i];
        let (rp, ip) = match &spec.momenta {
            Some(p) => (fmt(p[i].re), fmt(p[i].im)),
            None => (String::new(), String::new()),
        };
        out.write_record([
            l.to_string(),
            fmt(e.re),
            fmt(e.im),
            rp,
            ip,
            fmt(spec.kappa[i]),
            fmt(spec.c[i].norm()),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Vectors as row-major n×n little-endian f64 pairs (Re, Im); row ℓ is vector ℓ.
pub fn write_vectors_binary<W: Write>(mut w: W, vectors: &[Vec<Complex64>]) -> Result<serde_json::Value> {
    for v in vectors {
        for z in v {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(json!({
        "rows": vectors.len(),
        "cols": vectors.first().map_or(0, |v| v.len()),
        "dtype": "f64le",
        "layout": "row-major, interleaved re/im",
    }))
}

/// Image of the symbol at `points` equally spaced momenta.
pub fn write_symbol_image_csv<W: Write>(w: W, params: crate::SymbolParams, points: usize) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["p", "re_a", "im_a"])?;
    for k in 0..points {
        let p = std::f64::consts::TAU * (k as f64 + 0.5) / points as f64;
        let a = crate::symbol::eval_symbol(params, Complex64::new(p, 0.0))?;
        out.write_record([fmt(p), fmt(a.re), fmt(a.im)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_report_csv<W: Write>(w: W, r: &PerturbationReport) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record([
        "order_index",
        "re_e0",
        "im_e0",
        "re_e1",
        "im_e1",
        "re_e2",
        "im_e2",
        "re_predicted",
        "im_predicted",
        "re_expected_e2",
        "im_expected_e2",
        "predicted_kappa",
    ])?;
    for l in 0..r.e0.len() {
        let mut row = vec![l.to_string()];
        for z in [r.e0[l], r.e1[l], r.e2[l], r.predicted[l], r.expected_e2[l]] {
            row.push(fmt(z.re));
            row.push(fmt(z.im));
        }
        row.push(fmt(r.predicted_kappa[l]));
        out.write_record(row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_histogram_csv<W: Write>(w: W, h: &DosHistogram) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["bin_left", "bin_right", "mass"])?;
    for (b, m) in h.mass.iter().enumerate() {
        out.write_record([fmt(h.edges[b]), fmt(h.edges[b + 1]), fmt(*m)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_profiles_csv<W: Write>(w: W, profiles: &[LocalizationProfile]) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["order_index", "entropy", "ipr", "argmax", "class", "exp_rate", "alg_power"])?;
    for (l, p) in profiles.iter().enumerate() {
        out.write_record([
            l.to_string(),
            fmt(p.entropy),
            fmt(p.ipr),
            p.argmax_index.to_string(),
            p.decay_class.name().to_string(),
            fmt(p.fit_rates.exp_rate),
            fmt(p.fit_rates.alg_power),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct RunawayRow {
    initial_re: f64,
    initial_im: f64,
    final_re: f64,
    final_im: f64,
    kappa_max: f64,
    direction: crate::rank1::Direction,
}

pub fn census_json(c: &RunawayCensus) -> serde_json::Value {
    let rows: Vec<RunawayRow> = c
        .per_runaway
        .iter()
        .map(|r| RunawayRow {
            initial_re: r.initial.re,
            initial_im: r.initial.im,
            final_re: r.end.re,
            final_im: r.end.im,
            kappa_max: r.kappa_max,
            direction: r.direction,
        })
        .collect();
    json!({
        "alpha": c.params.alpha,
        "beta": c.params.beta,
        "n": c.n,
        "family": c.family.name(),
        "index": c.index,
        "sigma_max": c.sigma_max,
        "grid_points": c.sigma_grid.len(),
        "count_type_II": c.count_type_ii,
        "count_real_collisions": c.count_real_collisions,
        "count_inward": c.count_inward,
        "count_outward": c.count_outward,
        "count_kappa_ratio": c.count_kappa_ratio,
        "winding_of_E1": c.winding_of_e1,
        "min_gap": c.min_gap,
        "max_basis_condition": c.max_basis_condition,
        "per_runaway": rows,
    })
}

/// Spectrum at grid point k, one row per trajectory.
pub fn write_sweep_level_csv<W: Write>(w: W, sweep: &SigmaSweep, k: usize) -> Result<()> {
    write_spectrum_rows(w, &sweep.spectra[k], &sweep.trajectories.index[k])
}

pub fn sweep_manifest(sweep: &SigmaSweep) -> serde_json::Value {
    json!({
        "alpha": sweep.params.alpha,
        "beta": sweep.params.beta,
        "n": sweep.n,
        "seed": sweep.seed,
        "grid": sweep.sigma_grid(),
        "thresholds": sweep.thresholds,
        "diameter": sweep.diameter,
        "labels": sweep.labels,
        "collision_sigmas": sweep
            .labels
            .iter()
            .enumerate()
            .filter_map(|(l, lab)| lab.collision_sigma.map(|s| json!({"index": l, "sigma": s})))
            .collect::<Vec<_>>(),
        "disorder_variance": [sweep.v.variance.re, sweep.v.variance.im],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::eig_full;
    use crate::toeplitz::build_toeplitz;
    use crate::SymbolParams;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            let s = fmt(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn matrix_csv_shape() {
        let t = build_toeplitz(SymbolParams::working(), 5).unwrap();
        let mut buf = Vec::new();
        write_matrix_csv(&mut buf, &t).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows.len(), 5);
        let first: f64 = rows[1].split(',').next().unwrap().parse().unwrap();
        assert_eq!(first, t.entries[(1, 0)]);
    }

    #[test]
    fn spectrum_csv_has_header_and_rows() {
        let t = build_toeplitz(SymbolParams::working(), 6).unwrap();
        let s = eig_full(&t.entries).unwrap();
        let mut buf = Vec::new();
        write_spectrum_csv(&mut buf, &s).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("order_index,re_e,im_e,re_p,im_p,kappa,abs_c\n"));
        assert_eq!(text.lines().count(), 7);
        let mut bin = Vec::new();
        let head = write_vectors_binary(&mut bin, &s.right).unwrap();
        assert_eq!(bin.len(), 6 * 6 * 16);
        assert_eq!(head["rows"], 6);
    }
}
