//! Counter-based seed expansion.
//!
//! Every random stream in the simulator is keyed by a master seed plus a
//! tuple of counters (domain, sample index, channel, ...). Streams are
//! therefore independent of the order in which they are consumed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Domain tags for the different consumers of the master seed.
pub mod domain {
    pub const WEIGHTS: u64 = 1;
    pub const LFSR: u64 = 2;
    pub const SENSORY: u64 = 3;
    pub const TEACH: u64 = 4;
    pub const SPLIT: u64 = 5;
    pub const DEMO: u64 = 6;
    pub const ORDER: u64 = 7;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `counters` into `seed` one word at a time.
pub fn derive(seed: u64, counters: &[u64]) -> u64 {
    counters.iter().fold(splitmix64(seed), |acc, &c| splitmix64(acc ^ splitmix64(c)))
}

pub fn rng_for(seed: u64, counters: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, counters))
}
