//! Seeded random streams.
//!
//! One root seed drives a whole run. Each component (initial design, the
//! inner swarm of iteration `t`, the hyperparameter fit of iteration `t`, ...)
//! draws from its own stream derived from `(root, tag)`, so adding draws in one
//! component never shifts the numbers seen by another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The random generator used throughout the crate.
pub type SeedRng = ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a root seed with a component tag into a child seed.
pub fn derive_seed(root: u64, tag: &str) -> u64 {
    splitmix64(root ^ splitmix64(fnv1a(tag.as_bytes())))
}

/// Generator for the stream `(root, tag)`.
pub fn stream(root: u64, tag: &str) -> SeedRng {
    SeedRng::seed_from_u64(derive_seed(root, tag))
}

/// Generator seeded directly from `seed`.
pub fn seeded(seed: u64) -> SeedRng {
    SeedRng::seed_from_u64(seed)
}
