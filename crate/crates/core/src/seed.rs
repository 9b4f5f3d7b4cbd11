//! Seed derivation for reproducible, schedule-independent trials.
//!
//! Every trial gets its own seed from `split(master, n, trial)`, so results
//! never depend on which worker ran a job or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Weyl increment of SplitMix64 (`floor(2^64 / phi)`).
pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX_1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX_2: u64 = 0x94D0_49BB_1331_11EB;

/// One SplitMix64 output step: add the Weyl increment, then finalize.
#[inline]
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(MIX_1);
    z = (z ^ (z >> 27)).wrapping_mul(MIX_2);
    z ^ (z >> 31)
}

/// Per-trial seed: `mix(mix(mix(master) ^ n) ^ trial)`.
///
/// `split(master, 0, 0)` is reserved for the shared reference sample.
pub fn split(master: u64, n: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ n) ^ trial)
}

/// The generator used for all sampling in the crate.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
