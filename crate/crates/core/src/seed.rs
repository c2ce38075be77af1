//! Deterministic seed-stream derivation.
//!
//! Every random decision in the library draws from a ChaCha stream whose
//! seed is derived from a master seed plus a path of integers (trial index,
//! queriee id, repetition round, ...). Derivation is a pure function, so
//! trials reproduce under any execution order or worker count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; full-period avalanche mixer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `base` and a path of stream labels.
pub fn derive(base: u64, path: &[u64]) -> u64 {
    let mut h = splitmix64(base);
    for &part in path {
        h = splitmix64(h ^ splitmix64(part));
    }
    h
}

/// Seeded RNG for one derived stream.
pub fn rng(base: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(base, path))
}
