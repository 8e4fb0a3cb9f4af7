//! Seed derivation for reproducible, schedule-independent trial streams.
//!
//! Every trial gets its own ChaCha8 stream keyed by `(master_seed, point_index)`
//! with the trial index as the ChaCha stream id, so a trial's randomness never
//! depends on which worker ran it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for one sweep point, derived from the master seed.
pub fn point_seed(master_seed: u64, point_index: u64) -> u64 {
    mix64(mix64(master_seed) ^ mix64(point_index.wrapping_add(0x5bd1_e995)))
}

/// Independent stream for one trial of one sweep point.
pub fn trial_rng(point_seed: u64, trial_index: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(point_seed);
    rng.set_stream(trial_index);
    rng
}

/// Plain seeded generator for one-off sampling (CLI `sample`, tests).
pub fn seeded(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}
