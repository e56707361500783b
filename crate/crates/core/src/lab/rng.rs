//! Counter-based normal streams: `stream = f(seed, stream_id, counter)`.
//!
//! Each draw is addressed by its position, so any window of a simulation can be
//! regenerated without replaying what came before, and parallel paths do not
//! depend on scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Normals per block. Each block starts at its own ChaCha word position, so a seek
/// costs at most one block of draws.
const BLOCK: u128 = 1024;
/// ChaCha words reserved per block, far above what the ziggurat rejections consume.
const BLOCK_WORDS_LOG2: u32 = 24;

/// Stream purposes, combined with a path index into a ChaCha stream id.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Increments = 0,
    Initial = 1,
}

pub fn stream_id(path: u64, purpose: Purpose) -> u64 {
    (path << 4) | purpose as u64
}

/// Standard normals (ziggurat) addressed by index within a ChaCha8 stream.
pub struct NormalStream {
    rng: ChaCha8Rng,
    block: u128,
    left: u32,
}

impl NormalStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut s = NormalStream { rng, block: 0, left: 0 };
        s.enter(0);
        s
    }

    fn enter(&mut self, block: u128) {
        self.block = block;
        self.rng.set_word_pos(block << BLOCK_WORDS_LOG2);
        self.left = BLOCK as u32;
    }

    /// Positions the stream so the next draw is normal number `index`.
    pub fn seek(&mut self, index: u128) {
        self.enter(index / BLOCK);
        for _ in 0..index % BLOCK {
            self.next();
        }
    }

    #[inline]
    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> f64 {
        if self.left == 0 {
            self.enter(self.block + 1);
        }
        self.left -= 1;
        self.rng.sample(StandardNormal)
    }

    pub fn fill(&mut self, out: &mut [f64]) {
        for o in out {
            *o = self.next();
        }
    }
}
