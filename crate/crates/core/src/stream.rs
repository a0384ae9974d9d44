//! Counter-based random streams.
//!
//! Event `n` of job `j` under seed `s` always reads the same block of the
//! ChaCha8 keystream keyed by `(s, j)`, at word offset `n * WORDS_PER_PAIR`.
//! How events are chunked across workers therefore never changes what any
//! event sees.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Uniform draws consumed by one call to [`crate::model::generate_pair`].
pub const DRAWS_PER_PAIR: u64 = 4;

/// 32-bit keystream words per pair; each `f64` draw consumes one `u64`.
pub const WORDS_PER_PAIR: u128 = 2 * DRAWS_PER_PAIR as u128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamKey {
    pub seed: u64,
    pub job: u64,
}

impl StreamKey {
    pub fn new(seed: u64) -> Self {
        StreamKey { seed, job: 0 }
    }

    /// Independent stream for a sub-experiment (one setting pair, one grid
    /// point) under the same seed.
    pub fn for_job(self, job: u64) -> Self {
        StreamKey { seed: self.seed, job }
    }

    /// Generator positioned at the first draw of event `index`.
    pub fn pair_rng(&self, index: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.job.to_le_bytes());
        key[16..24].copy_from_slice(b"eprb-evt");
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_word_pos(u128::from(index) * WORDS_PER_PAIR);
        rng
    }
}
