//! Deterministic seed derivation.
//!
//! All randomness in a run flows from one base seed through the mixer below,
//! so datasets are reproducible bit-for-bit across platforms and thread
//! counts.  The derivation is intentionally simple enough to re-implement
//! elsewhere: fold every component through splitmix64, starting from the
//! base seed:
//!
//! ```text
//! state = splitmix64(base)
//! for part in parts: state = splitmix64(state ^ splitmix64(part))
//! ```

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Stream tags, one per purpose, so independent substreams never collide.
pub mod tag {
    pub const CLOUD_INIT: u64 = 0x01;
    pub const TRUTH: u64 = 0x02;
    pub const DESIGN: u64 = 0x03;
    pub const RESAMPLE: u64 = 0x04;
    pub const SAMPLED_LIKELIHOOD: u64 = 0x05;
    pub const TRIAL: u64 = 0x06;
    pub const MODEL_NULL: u64 = 0x07;
    pub const MODEL_ALT: u64 = 0x08;
}

/// The splitmix64 finalizer (Steele, Lea, Flood's constants).
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Fold a base seed and a sequence of distinguishing parts into one seed.
pub fn mix(base: u64, parts: &[u64]) -> u64 {
    let mut state = splitmix64(base);
    for &p in parts {
        state = splitmix64(state ^ splitmix64(p));
    }
    state
}

/// A ChaCha stream keyed by the mixed seed.  ChaCha is used (rather than a
/// small-state generator) so substreams derived from nearby seeds are
/// statistically independent.
pub fn stream(base: u64, parts: &[u64]) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(mix(base, parts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mix_is_stable() {
        // Frozen values: changing the derivation would silently invalidate
        // every recorded dataset, so pin it.
        assert_eq!(splitmix64(0), 0xe220a8397b1dcdaf);
        assert_eq!(mix(42, &[tag::TRIAL, 0]), mix(42, &[tag::TRIAL, 0]));
        assert_ne!(mix(42, &[tag::TRIAL, 0]), mix(42, &[tag::TRIAL, 1]));
        assert_ne!(mix(42, &[tag::TRIAL]), mix(43, &[tag::TRIAL]));
    }

    #[test]
    fn streams_reproduce() {
        use rand::RngCore;
        let mut a = stream(7, &[tag::DESIGN, 3]);
        let mut b = stream(7, &[tag::DESIGN, 3]);
        for _ in 0..16 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }
}
