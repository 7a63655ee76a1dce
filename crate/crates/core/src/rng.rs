//! Counter-based stream derivation for reproducible Monte-Carlo runs.
//!
//! All randomness flows from one 64-bit seed. Each logical stream (a sample,
//! a chart, a restart) gets its own ChaCha generator seeded from
//! splitmix64(seed, index), so results are independent of thread count and
//! bit-reproducible for a fixed seed.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Derives a child seed for stream `index` of the master `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ splitmix64(index.wrapping_add(0xA5A5A5A5A5A5A5A5)))
}

/// Generator for one derived stream.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a1 = stream_rng(7, 0);
        let mut a2 = stream_rng(7, 0);
        let mut b = stream_rng(7, 1);
        let x1: u64 = a1.gen();
        let x2: u64 = a2.gen();
        let y: u64 = b.gen();
        assert_eq!(x1, x2);
        assert_ne!(x1, y);
    }
}
