//! Seeded random substreams.
//!
//! Every random draw in the crate comes from a ChaCha8 generator keyed by a
//! `(seed, stream)` pair, so independent consumers of one master seed never
//! share a sequence.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream ids reserved by the crate.
pub mod stream {
    /// Base id for SBM edge sampling; attempt `a` uses `GRAPH + a`.
    pub const GRAPH: u64 = 0x100;
    pub const INJECTION: u64 = 0x300;
    pub const SOLVER_INIT: u64 = 0x400;
    pub const RANDOM_GUESS: u64 = 0x500;
}

/// Generator for substream `stream` of `seed`.
pub fn substream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derives the seed of child `index` (e.g. trial number) from a master seed.
///
/// SplitMix64 finalizer over `seed ^ golden * (index + 1)`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
