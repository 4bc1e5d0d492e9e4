//! Seed derivation.
//!
//! Every stochastic routine takes an explicit `u64` seed and draws from
//! [`ChaCha8Rng`]. Sub-tasks (a resampling round, a cluster count, a left-out
//! feature) get child seeds from [`derive`], so a task's randomness depends
//! only on its coordinates and never on scheduling order.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// The generator used everywhere.
pub type Rng = ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for the coordinate path `path` below `master`.
pub fn derive(master: u64, path: &[u64]) -> u64 {
    let mut s = mix(master);
    for &p in path {
        s = mix(s ^ mix(p.wrapping_add(0x632B_E59B_D9B4_E019)));
    }
    s
}

pub fn rng(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// Method tags: the first coordinate of every task seed.
pub mod tag {
    pub const GAP: u64 = 1;
    pub const MECCA: u64 = 2;
    pub const ME: u64 = 3;
    pub const CLEST: u64 = 4;
    pub const LEVINE_DOMANY: u64 = 5;
    pub const ROTH: u64 = 6;
    pub const BAGCLUST1: u64 = 7;
    pub const BAGCLUST2: u64 = 8;
    pub const CONSENSUS: u64 = 9;
    pub const FC: u64 = 10;
}

/// What a task seed is used for.
pub mod role {
    pub const DGP: u64 = 1;
    pub const SPLIT: u64 = 2;
    pub const CLUSTER: u64 = 3;
    pub const TRAIN: u64 = 4;
}

/// Iteration coordinate of work on the original dataset, shared by all
/// iterations.
pub const ORIGINAL: u64 = u64::MAX;

/// Coordinate standing for "every k" when one draw serves all cluster counts.
pub const ALL_K: u64 = 0;

/// Seed of one task of a resampling method.
pub fn task(master: u64, tag: u64, k: u64, iteration: u64, role: u64, index: u64) -> u64 {
    derive(master, &[tag, k, iteration, role, index])
}
