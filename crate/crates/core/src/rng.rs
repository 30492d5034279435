//! Counter-derived random streams.
//!
//! Every simulated path owns a `u64` seed derived from the experiment seed and
//! the path index, so a report depends only on `(inputs, seed)` and never on
//! how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for. Separate streams keep the Brownian increments
/// of a path identical no matter how many draws the latent variables consumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamKind {
    Latent,
    Noise,
    Bridge,
}

impl StreamKind {
    fn id(self) -> u64 {
        match self {
            StreamKind::Latent => 0,
            StreamKind::Noise => 1,
            StreamKind::Bridge => 2,
        }
    }
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th independent unit (path or batch) of an experiment.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

pub fn stream(seed: u64, kind: StreamKind) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(kind.id());
    rng
}
