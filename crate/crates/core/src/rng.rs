//! Counter-based seed splitting.
//!
//! Every stream (trial, ε level, refinement level, ...) derives its own
//! generator from `(master seed, stream index)`, so results never depend on
//! scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Sub-seed for stream `index` of `master`.
pub fn split_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master ^ 0x9e37_79b9_7f4a_7c15).wrapping_add(index.wrapping_mul(0xd6e8_feb8_6659_fd93)))
}

/// Sub-seed for a two-level stream, e.g. (experiment level, trial).
pub fn split_seed2(master: u64, a: u64, b: u64) -> u64 {
    split_seed(split_seed(master, a), b)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
