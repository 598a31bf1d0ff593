//! Seedable random streams.
//!
//! Every stochastic routine takes an explicit `&mut SimRng`. Independent
//! streams are derived from a parent seed and a label with [`derive_seed`],
//! so parallel workers never share state and results do not depend on
//! scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for stream `label` of `parent`.
///
/// Defined as `splitmix64(parent ^ splitmix64(label))`. This is part of the
/// output format: changing it changes every simulated table.
pub fn derive_seed(parent: u64, label: u64) -> u64 {
    splitmix64(parent ^ splitmix64(label))
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

pub fn substream(parent: u64, label: u64) -> SimRng {
    rng_from_seed(derive_seed(parent, label))
}

/// Stream labels used inside one simulated trial.
pub mod labels {
    pub const SERIES: u64 = 1;
    pub const PLACEMENT: u64 = 2;
    pub const PROCEDURE_BASE: u64 = 100;
}
