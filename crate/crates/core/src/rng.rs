//! Seeded random streams.
//!
//! Every randomized routine draws from a ChaCha8 generator keyed by the run
//! seed, with a fixed stream number per purpose. Pivot selection and
//! per-triangle coin flips therefore never perturb each other.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream numbers. Fixed forever; changing one changes every recorded run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Pivot = 0,
    Triangle = 1,
    Family = 2,
    Noise = 3,
    /// Base for per-pair crowd answers; the pair index is added.
    Crowd = 1 << 32,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    stream_rng_at(seed, stream as u64)
}

pub fn stream_rng_at(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Seed from `CCQ_SEED`, falling back to `default`.
pub fn env_seed(default: u64) -> u64 {
    std::env::var("CCQ_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(default)
}
