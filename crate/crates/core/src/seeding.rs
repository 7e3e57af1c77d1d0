//! Deterministic seed derivation.
//!
//! Every random stream in the crate is a `ChaCha8Rng` seeded from a `u64`
//! derived here, so results depend only on the seeds the caller supplies and
//! never on thread scheduling or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type DepthRng = ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a stream seed from a base seed and a stream index.
pub fn derive(seed: u64, stream: u64) -> u64 {
    mix64(seed ^ mix64(stream))
}

/// Seed that depends on a point's exact coordinates, so identical points get
/// identical search streams regardless of where they appear in a batch.
pub fn point_seed(seed: u64, coords: &[f64]) -> u64 {
    let mut h = mix64(seed ^ 0x5EED_0F_D1AE_C7u64);
    for &c in coords {
        // -0.0 and 0.0 are the same point
        let bits = if c == 0.0 { 0 } else { c.to_bits() };
        h = mix64(h ^ bits);
    }
    h
}

pub fn rng_from(seed: u64) -> DepthRng {
    ChaCha8Rng::seed_from_u64(seed)
}
