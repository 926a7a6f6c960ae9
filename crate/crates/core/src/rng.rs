//! Seeded, independent random streams.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags. Each consumer of randomness draws from its own stream so
/// that adding draws in one place never shifts another.
pub mod tag {
    pub const INIT: u64 = 1;
    pub const SCHEDULE: u64 = 2;
    pub const INPUT_NOISE: u64 = 3;
    pub const GRADIENT_NOISE: u64 = 4;
    pub const DP_NOISE: u64 = 5;
    pub const SHARDS: u64 = 6;
    pub const SPLIT: u64 = 7;
    pub const BASELINE: u64 = 10;
    pub const ATTACK: u64 = 11;
    pub const SELFTEST: u64 = 12;
    pub const EVAL_NOISE: u64 = 13;
    /// Client `i` batches use stream `CLIENT_BATCH + i`.
    pub const CLIENT_BATCH: u64 = 1 << 32;
    /// Client `i` privacy noise uses stream `CLIENT_NOISE + i`.
    pub const CLIENT_NOISE: u64 = 1 << 36;
    /// Delegated shot `i` draws its secrets from `UBQC_SECRETS + i`.
    pub const UBQC_SECRETS: u64 = 1 << 40;
}

/// ChaCha8 stream `tag` under `seed`.
pub fn stream(seed: u64, tag: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag);
    rng
}
