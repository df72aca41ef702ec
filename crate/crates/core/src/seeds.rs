//! Named random substreams derived from one user seed.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Traffic = 1,
    Perturb = 2,
    Failures = 3,
}

/// Generator for `stream` under `seed`; `index` separates independent draws
/// within one stream (trials, scales).
pub fn stream_rng(seed: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((stream as u64) << 48) | index);
    rng
}

/// A 64-bit seed drawn from a substream, for APIs that take plain seeds.
pub fn stream_seed(seed: u64, stream: Stream, index: u64) -> u64 {
    stream_rng(seed, stream, index).next_u64()
}
