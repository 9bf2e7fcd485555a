//! Seedable random streams.
//!
//! Every consumer of randomness draws from its own ChaCha stream derived from
//! a `(seed, Stream)` pair, so an environment generated from seed 7 is the
//! same game no matter which learner later trains on it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    Environment,
    Rollout,
    Learner,
    Evaluation,
    Exploiter,
    Benchmark,
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::Environment => 1,
            Stream::Rollout => 2,
            Stream::Learner => 3,
            Stream::Evaluation => 4,
            Stream::Exploiter => 5,
            Stream::Benchmark => 6,
        }
    }
}

pub fn stream_rng(seed: u64, stream: Stream) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream.id());
    rng
}

/// Derives an independent child stream, e.g. one per best-response phase.
pub fn substream(seed: u64, stream: Stream, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(stream.id());
    rng
}
