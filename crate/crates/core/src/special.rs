//! Log-gamma and the Barnes G-function on the real line.

use crate::error::{Error, Result};
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Nearest integer when `x` sits on a non-positive integer, i.e. a pole of Γ.
pub fn gamma_pole(x: f64) -> bool {
    x <= 0.0 && (x - x.round()).abs() < 1e-12
}

/// ln|Γ(x)| together with the sign of Γ(x). `None` at the poles.
pub fn ln_gamma_signed(x: f64) -> Option<(f64, f64)> {
    if gamma_pole(x) || !x.is_finite() {
        return None;
    }
    if x >= 1.0 && x <= 171.0 && x == x.trunc() {
        let mut f = 1.0f64;
        for k in 2..x as u32 {
            f *= k as f64;
        }
        return Some((f.ln(), 1.0));
    }
    if x < 0.5 {
        let s = (PI * x).sin();
        let (lg, _) = ln_gamma_signed(1.0 - x)?;
        return Some((PI.ln() - s.abs().ln() - lg, s.signum()));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    Some((0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln(), 1.0))
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    match ln_gamma_signed(x) {
        Some((v, _)) => v,
        None => f64::INFINITY,
    }
}

/// Γ(x), zero never returned; infinite at poles.
pub fn gamma(x: f64) -> f64 {
    match ln_gamma_signed(x) {
        Some((v, s)) => s * v.exp(),
        None => f64::INFINITY,
    }
}

/// ln G(1 + z) for z in (0, 1] from the Weierstrass product, truncated at
/// `TERMS` factors with the remainder summed asymptotically.
fn ln_barnes_g_base(z: f64) -> f64 {
    const TERMS: usize = 100_000;
    let mut sum = 0.0;
    let mut comp = 0.0;
    for k in (1..=TERMS).rev() {
        let kf = k as f64;
        let u = z / kf;
        // k ln(1 + z/k) - z + z^2/(2k)
        let term = if u < 1e-2 {
            let mut s = 0.0;
            let mut pw = u * u * u;
            let mut sign = 1.0;
            for m in 3..12 {
                s += sign * pw / m as f64;
                pw *= u;
                sign = -sign;
            }
            kf * s
        } else {
            kf * u.ln_1p() - z + z * z / (2.0 * kf)
        };
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let n = TERMS as f64;
    let zeta2 = 1.0 / n - 0.5 / (n * n) + 1.0 / (6.0 * n * n * n);
    let zeta3 = 0.5 / (n * n) - 0.5 / (n * n * n);
    let zeta4 = 1.0 / (3.0 * n * n * n);
    let tail = z.powi(3) / 3.0 * zeta2 - z.powi(4) / 4.0 * zeta3 + z.powi(5) / 5.0 * zeta4;
    0.5 * z * (2.0 * PI).ln() - 0.5 * (z + (1.0 + EULER_GAMMA) * z * z) + sum + tail
}

/// ln G(x) for x > 0.
pub fn ln_barnes_g(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("Barnes G needs x > 0, got {x}")));
    }
    if x == 1.0 || x == 2.0 {
        return Ok(0.0);
    }
    let mut y = x;
    let mut acc = 0.0;
    while y > 2.0 {
        y -= 1.0;
        acc += ln_gamma(y);
    }
    if y <= 1.0 {
        acc -= ln_gamma(y);
        y += 1.0;
    }
    Ok(acc + ln_barnes_g_base(y - 1.0))
}
