//! Deterministic RNG substreams derived from a single session seed.
//!
//! Every consumer of randomness gets its own ChaCha stream, so the draws of
//! one party never shift the draws of another and a whole session is a pure
//! function of its seed.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type SessionRng = ChaCha20Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Alice,
    Bob,
    Source,
    Game,
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::Alice => 1,
            Stream::Bob => 2,
            Stream::Source => 3,
            Stream::Game => 4,
        }
    }
}

/// The generator for `stream` under `seed`.
pub fn substream(seed: u64, stream: Stream) -> SessionRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream.id() << 56);
    rng
}

/// A generator for one indexed item (e.g. one round) inside `stream`.
pub fn indexed_substream(seed: u64, stream: Stream, index: u64) -> SessionRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream((stream.id() << 56) | (index & ((1 << 56) - 1)));
    rng
}
