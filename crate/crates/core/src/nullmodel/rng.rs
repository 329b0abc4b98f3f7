//! Deterministic stream derivation. Every (seed, stock, trial, purpose)
//! tuple maps to its own ChaCha8 stream, so results never depend on the
//! order in which parallel workers run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const RNG_ALGORITHM: &str =
    "chacha8(rand_chacha-0.9)+splitmix64(seed,fnv1a64(stock),trial,purpose)";

/// Purposes, so shuffling and noise never share a stream.
pub mod purpose {
    pub const SHUFFLE: u64 = 1;
    pub const NOISE: u64 = 2;
    pub const SCHEDULE: u64 = 3;
    pub const CALIBRATION: u64 = 4;
    pub const RENDER: u64 = 5;
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

pub fn stream_key(seed: u64, stock: &str, trial: u64, purpose: u64) -> u64 {
    let mut h = splitmix64(seed);
    h = splitmix64(h ^ fnv1a64(stock.as_bytes()));
    h = splitmix64(h ^ trial);
    splitmix64(h ^ purpose)
}

pub fn stream_rng(seed: u64, stock: &str, trial: u64, purpose: u64) -> ChaCha8Rng {
    let mut state = stream_key(seed, stock, trial, purpose);
    let mut bytes = [0u8; 32];
    for chunk in bytes.chunks_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha8Rng::from_seed(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn splitmix_reference_values() {
        // first outputs of the reference generator seeded with 0
        let mut s = 0u64;
        let mut next = || {
            let out = splitmix64(s);
            s = s.wrapping_add(0x9E37_79B9_7F4A_7C15);
            out
        };
        assert_eq!(next(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(next(), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn streams_are_distinct_and_stable() {
        let a: u64 = stream_rng(1, "7203", 0, purpose::NOISE).random();
        let b: u64 = stream_rng(1, "7203", 0, purpose::NOISE).random();
        let c: u64 = stream_rng(1, "7203", 1, purpose::NOISE).random();
        let d: u64 = stream_rng(1, "7204", 0, purpose::NOISE).random();
        let e: u64 = stream_rng(1, "7203", 0, purpose::SHUFFLE).random();
        assert_eq!(a, b);
        assert!(a != c && a != d && a != e);
    }
}
