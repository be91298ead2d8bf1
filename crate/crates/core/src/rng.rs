//! Seed derivation and random vector helpers.
//!
//! Every stochastic routine draws from a `ChaCha8Rng` seeded through
//! [`mix_seed`], so results depend only on the root seed and the index of the
//! sub-stream, never on scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::Scalar;

/// SplitMix64 finalizer applied to `root + (index + 1) * golden`.
///
/// This is the derivation used for per-repetition and per-probe seeds.
pub fn mix_seed(root: u64, index: u64) -> u64 {
    let mut z = root.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from(root: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(root, index))
}

/// i.i.d. N(0, sigma^2) entries.
pub fn gaussian_vector<T: Scalar, R: Rng + ?Sized>(n: usize, sigma: T, rng: &mut R) -> Vec<T> {
    (0..n)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            sigma * T::lit(z)
        })
        .collect()
}

/// i.i.d. uniform +-1 entries.
pub fn rademacher_vector<T: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<T> {
    (0..n)
        .map(|_| if rng.gen::<bool>() { T::one() } else { -T::one() })
        .collect()
}
