//! Seeded random streams.
//!
//! Every random draw in the crate comes from [`ChaCha8Rng`]. A top-level
//! `seed` is split into independent streams with [`stream`]: the generator is
//! seeded with `seed_from_u64(seed)` and then moved to ChaCha stream number
//! `id`. Parallel workers each take their own stream id so results do not
//! depend on scheduling. [`derive_seed`] turns a seed plus a text tag into a
//! sub-seed, used to give each analysis its own seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn stream(seed: u64, id: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, tag: &str) -> u64 {
    // FNV-1a over the tag, then mixed with the parent seed.
    let h = tag.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3));
    mix(seed ^ mix(h))
}
