//! Seeded randomness.
//!
//! Every run owns a [`SeededRandomSource`]. Trial `i` of an experiment with
//! base seed `s` uses the ChaCha8 generator keyed by `s` on stream `i`, so
//! trials are independent and individually reproducible no matter which
//! thread executes them.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SeededRandomSource = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRandomSource {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for trial `trial_index` of an experiment seeded with `seed`.
pub fn trial_stream(seed: u64, trial_index: u64) -> SeededRandomSource {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

/// Derives an independent child generator, keyed by a word drawn from
/// `parent` and placed on stream `stream`.
pub fn child(parent: &mut SeededRandomSource, stream: u64) -> SeededRandomSource {
    let key = parent.next_u64();
    trial_stream(key, stream)
}
