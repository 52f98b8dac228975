//! Seeded randomness.
//!
//! Every random draw in the crate goes through a [`ChaCha8Rng`] built here so
//! runs are reproducible from their integer seeds alone.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Counter-based derivation: the value depends only on `(seed, counter)`,
/// never on how many draws happened before.
pub fn derive_seed(seed: u64, counter: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(counter);
    rng.next_u64()
}

/// `N(0, stddev²)` truncated to `[−2·stddev, 2·stddev]` by rejection.
pub fn truncated_normal<R: Rng + ?Sized>(rng: &mut R, stddev: f64) -> f64 {
    loop {
        let z: f64 = StandardNormal.sample(rng);
        if z.abs() <= 2.0 {
            return z * stddev;
        }
    }
}

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}
