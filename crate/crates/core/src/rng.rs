//! Seeded random streams. Each (stage name, trial) pair gets its own ChaCha
//! stream, so draws do not depend on evaluation order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Generator for the `trial`-th draw of stage `name` under `seed`.
pub fn substream(seed: u64, name: &str, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stream = fnv1a(name.as_bytes()) ^ trial.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    rng.set_stream(stream);
    rng
}

/// n independent standard normals.
pub fn normals<R: rand::Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}
