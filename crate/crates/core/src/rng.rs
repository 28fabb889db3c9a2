//! Seeded, stream-separated randomness.
//!
//! Every stochastic component draws from its own `(seed, stream_id)` pair so
//! that, for example, re-drawing the noise never perturbs the masks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Well-known stream ids. Monte Carlo trials use `TRIAL_BASE + trial`.
pub mod streams {
    pub const MASKS: u64 = 1;
    pub const NOISE: u64 = 2;
    pub const PHANTOM: u64 = 3;
    pub const CODEBOOK: u64 = 4;
    pub const CORPUS: u64 = 5;
    pub const TRIAL_BASE: u64 = 1 << 32;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSpec {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngSpec {
    pub const fn new(seed: u64, stream_id: u64) -> Self {
        RngSpec { seed, stream_id }
    }

    /// Same seed, different stream.
    pub const fn stream(self, stream_id: u64) -> Self {
        RngSpec {
            seed: self.seed,
            stream_id,
        }
    }

    /// Independent sub-stream for Monte Carlo trial `trial`.
    pub fn trial(self, trial: u64) -> Self {
        // Mix the parent stream into the seed so trial streams of different
        // parents never alias.
        let seed = self.seed ^ self.stream_id.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        RngSpec {
            seed,
            stream_id: streams::TRIAL_BASE.wrapping_add(trial),
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}
