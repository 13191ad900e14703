//! Seeded, splittable random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A deterministic random stream identified by `(seed, stream)`.
///
/// Streams with the same seed and different ids are independent ChaCha
/// streams, so work can be split across threads without changing results.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Stream for the sampling block `(k, i, l)`; id 0 is reserved for ranks.
    pub fn for_block(seed: u64, k: usize, i: usize, l: usize) -> Self {
        let id = ((k as u64) << 48) | ((l as u64 & 0xffff) << 32) | (i as u64 & 0xffff_ffff);
        Self::new(seed, id.wrapping_add(1))
    }
}
