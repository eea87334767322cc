//! Seeded random streams.
//!
//! Every Monte Carlo consumer in the crate derives its randomness from a
//! `(seed, stream)` pair so that work split across threads yields the same
//! draws as a sequential run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Independent sub-stream `stream` of the generator seeded by `seed`.
pub fn substream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derive a child seed, used when a sub-stream itself needs to fan out.
pub fn child_seed(seed: u64, stream: u64) -> u64 {
    use rand::RngCore;
    substream(seed, stream).next_u64()
}
