//! Shared inputs for the benchmarks.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

/// `n` rows of `dim` uniform values in [-1, 1).
pub fn random_rows(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect()
}

/// Points on a noisy convex trade-off curve in the unit box.
pub fn trade_off(n: usize, seed: u64) -> Vec<fgf_core::FrontPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let x: f64 = rng.gen();
            let y = ((1.0 - x).powi(2) + rng.gen_range(0.0..0.1)).min(1.0);
            fgf_core::FrontPoint::new(x, y, i)
        })
        .collect()
}
