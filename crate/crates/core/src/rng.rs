//! Counter-based random streams.
//!
//! Every Monte Carlo draw is keyed by `(seed, sample, layer)`, so results do
//! not depend on evaluation order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Root seed from which all streams of a run are derived.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct StreamSeed(pub u64);

impl StreamSeed {
    /// The stream for one `(sample, layer)` cell.
    pub fn stream(self, sample: u64, layer: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(sample);
        // Each layer owns a disjoint window of 2^40 words of the keystream.
        rng.set_word_pos((layer as u128) << 40);
        rng
    }

    /// Derived seed for an independent sub-experiment.
    pub fn child(self, tag: u64) -> StreamSeed {
        StreamSeed(splitmix64(self.0 ^ splitmix64(tag.wrapping_add(0x9e37_79b9_7f4a_7c15))))
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
