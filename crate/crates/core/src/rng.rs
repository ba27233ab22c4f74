//! Named random streams. Every consumer derives its generator from a seed
//! and a fixed stream id, so e.g. design and noise never share draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const DESIGN_STREAM: u64 = 1;
pub const NOISE_STREAM: u64 = 2;
pub const PRIOR_STREAM: u64 = 3;
/// Chain `i` uses stream `CHAIN_STREAM_BASE + i`.
pub const CHAIN_STREAM_BASE: u64 = 1 << 16;

pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
