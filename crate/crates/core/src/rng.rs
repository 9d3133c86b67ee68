//! Seed derivation.
//!
//! Every random choice in the crate draws from a stream identified by
//! `(master_seed, purpose_tag, index)`. Streams for different tags or indices
//! are statistically independent, so trials and vertices never share state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator behind every stream.
pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(tag: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Derives a sub-seed from a master seed, a purpose tag and an index.
pub fn derive_seed(master: u64, tag: &str, index: u64) -> u64 {
    let a = splitmix64(master);
    let b = splitmix64(a ^ fnv1a(tag));
    splitmix64(b ^ splitmix64(index.wrapping_add(0x632b_e59b_d9b4_e019)))
}

/// Opens the stream `(master, tag, index)`.
pub fn stream(master: u64, tag: &str, index: u64) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(master, tag, index))
}

/// Opens a stream directly from a seed.
pub fn from_seed(seed: u64) -> StreamRng {
    StreamRng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn derivation_is_deterministic_and_tag_sensitive() {
        assert_eq!(derive_seed(7, "real", 3), derive_seed(7, "real", 3));
        assert_ne!(derive_seed(7, "real", 3), derive_seed(7, "proto", 3));
        assert_ne!(derive_seed(7, "real", 3), derive_seed(7, "real", 4));
        assert_ne!(derive_seed(7, "real", 3), derive_seed(8, "real", 3));
    }

    #[test]
    fn streams_replay() {
        let a: Vec<u64> = stream(1, "x", 0).random_iter().take(8).collect();
        let b: Vec<u64> = stream(1, "x", 0).random_iter().take(8).collect();
        assert_eq!(a, b);
    }
}
