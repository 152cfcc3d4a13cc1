//! Seed derivation for reproducible parallel Monte Carlo.
//!
//! Every random quantity in the crate comes from a [`ChaCha8Rng`] keyed by a
//! user seed and selected by a stream index, so a trial's draws depend only on
//! `(seed, index)` and never on worker scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Child seed for a nested level of parallelism (e.g. grid point, then trial).
pub fn child_seed(seed: u64, index: u64) -> u64 {
    stream_rng(seed, index).next_u64()
}
