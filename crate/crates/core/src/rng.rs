//! Seed derivation and the sampling generator.
//!
//! Every sampled path is driven by a ChaCha8 stream seeded from a 64-bit
//! value; per-trial seeds are derived from a base seed with SplitMix64 so a
//! trial's randomness depends only on `(base_seed, trial_index)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type PathRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `trial` of an experiment with seed `base`.
pub fn trial_seed(base: u64, trial: u64) -> u64 {
    splitmix64(base ^ splitmix64(trial))
}

/// Independent seeds for the `x` and `y` paths of one trial.
pub fn pair_seeds(trial_seed: u64) -> (u64, u64) {
    let sx = splitmix64(trial_seed);
    let sy = splitmix64(sx ^ trial_seed.rotate_left(17));
    (sx, sy)
}

pub fn path_rng(seed: u64) -> PathRng {
    ChaCha8Rng::seed_from_u64(seed)
}
