//! Seeded randomness. Every stream is a ChaCha8 generator keyed by a 64-bit
//! seed; child seeds are derived with SplitMix64 so that sessions, attempts
//! and trials can be replayed independently.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Recorded in codebooks and transcripts next to every seed.
pub const PRNG_ID: &str = "chacha8/splitmix64";

pub type Stream = ChaCha8Rng;

pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th child stream of `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    splitmix64(base ^ splitmix64(index))
}
