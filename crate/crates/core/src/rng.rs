//! Counter-based random streams.
//!
//! Every sample is drawn from a ChaCha8 stream selected by `(base, trial)`:
//! the base seed picks the key and the trial index picks the stream, so trial
//! `t` sees the same bits no matter which thread runs it or in what order.
//! Within a trial, entries are consumed in a fixed (row-major) order, which
//! makes the entry index a position in the stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedKey {
    pub base: u64,
    pub trial: u64,
}

impl SeedKey {
    pub fn new(base: u64) -> Self {
        Self { base, trial: 0 }
    }

    pub fn trial(self, trial: u64) -> Self {
        Self { trial, ..self }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.base);
        rng.set_stream(self.trial);
        rng
    }
}

impl From<u64> for SeedKey {
    fn from(base: u64) -> Self {
        Self::new(base)
    }
}
