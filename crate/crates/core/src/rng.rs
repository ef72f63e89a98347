//! Position-keyed randomness.
//!
//! Every random draw is addressed by `(seed, domain, ids...)`, so a run is
//! reproducible regardless of the order in which edges or vertices are visited.

use rand::SeedableRng;
use rand_xoshiro::SplitMix64;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Separates the independent random streams used across the pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Domain {
    Assign = 1,
    EdgeCoin = 2,
    VertexCoin = 3,
    Reserve = 4,
    Restart = 5,
    Finish = 6,
    Generate = 7,
    Repair = 8,
    Embed = 9,
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_key(seed: u64, domain: Domain, ids: &[u64]) -> u64 {
    let mut h = mix64(seed ^ (domain as u64).wrapping_mul(GOLDEN));
    for &id in ids {
        h = mix64(h.wrapping_add(GOLDEN) ^ id);
    }
    h
}

/// A fresh generator for the stream at the given key.
pub fn stream(seed: u64, domain: Domain, ids: &[u64]) -> SplitMix64 {
    SplitMix64::seed_from_u64(derive_key(seed, domain, ids))
}

/// Uniform value in `[0, 1)` addressed by key; used for single coin flips.
pub fn unit(seed: u64, domain: Domain, ids: &[u64]) -> f64 {
    (derive_key(seed, domain, ids) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
