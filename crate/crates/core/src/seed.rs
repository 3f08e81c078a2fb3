//! Deterministic seed derivation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer applied to a combination of two words.
pub fn derive(base: u64, stream: u64) -> u64 {
    let mut z = base
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(stream.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream tags so that distinct consumers of one base seed never collide.
pub mod stream {
    pub const SHIFT: u64 = 0x5348_4946;
    pub const ROTATION: u64 = 0x524f_5441;
    pub const POPULATION: u64 = 0x504f_5055;
    pub const MODEL: u64 = 0x4d4f_4445;
    pub const SHUFFLE: u64 = 0x5348_5546;
    pub const JSO: u64 = 0x4a53_4f00;
}
