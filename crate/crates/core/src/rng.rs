//! Seed derivation for reproducible, independent sample streams.
//!
//! `substream_seed(master, index) = splitmix64(master ^ splitmix64(index))`,
//! where `splitmix64` is the output function of Vigna's SplitMix64 generator
//! (add the golden-ratio increment, then the two xor-shift-multiply rounds).
//! The derived seed keys a ChaCha8 generator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// One SplitMix64 step applied to `x` as the state.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn substream_seed(master_seed: u64, stream_index: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(stream_index))
}

/// Address of an independent random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self {
            master_seed,
            stream_index,
        }
    }

    pub fn seed(&self) -> u64 {
        substream_seed(self.master_seed, self.stream_index)
    }

    /// Fresh generator positioned at the start of the stream.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed())
    }
}
