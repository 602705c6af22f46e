//! Seeded random streams.
//!
//! Every randomized routine takes an explicit `u64` seed. Parallel work is
//! split into a fixed number of chunks, each with its own stream derived from
//! `(seed, chunk)`, so results do not depend on the thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn stream(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for worker (or chunk, or instance) `index`.
pub fn substream(seed: u64, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

/// Split `total` trials into `chunks` nearly equal parts.
pub fn chunk_sizes(total: u64, chunks: u64) -> Vec<u64> {
    let chunks = chunks.max(1);
    let base = total / chunks;
    let extra = total % chunks;
    (0..chunks).map(|c| base + u64::from(c < extra)).collect()
}

/// A `u64` seed for an auxiliary purpose `index`, derived from `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    use rand::RngCore;
    substream(seed, index).next_u64()
}
