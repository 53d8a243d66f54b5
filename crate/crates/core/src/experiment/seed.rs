//! Deterministic seeding. Every random stream in a study is derived from
//! `(base_seed, replicate, label)`, never from execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used for all simulation and filtering.
pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

/// Mixes a base seed, replicate index and stream label into a 64-bit seed.
pub fn derive(base_seed: u64, replicate: u64, label: &str) -> u64 {
    let mut h = splitmix64(base_seed);
    h = splitmix64(h ^ splitmix64(replicate.wrapping_add(0x5851_F42D_4C95_7F2D)));
    splitmix64(h ^ fnv1a(label.as_bytes()))
}
