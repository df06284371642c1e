//! SplitMix64 streams and counter-based hashing.
//!
//! The mixing permutation and filler bits are defined bit-exactly in terms of
//! the sequential [`SplitMix64`] stream. The camera simulator instead derives
//! an independent sub-stream per pixel with [`counter_key`], so captures do not
//! depend on evaluation order.

use rand_core::RngCore;
use rand_distr::{Distribution, StandardNormal};

pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX_1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX_2: u64 = 0x94D0_49BB_1331_11EB;

/// The SplitMix64 output finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(MIX_1);
    z = (z ^ (z >> 27)).wrapping_mul(MIX_2);
    z ^ (z >> 31)
}

/// Sequential SplitMix64 generator: `state += gamma; return mix64(state)`.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Unbiased draw from `[0, bound)` by rejection.
    ///
    /// Outputs below `2^64 mod bound` are discarded so the accepted range is a
    /// whole number of `bound`-sized intervals.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let r = self.next_u64();
            if r >= threshold {
                return r % bound;
            }
        }
    }

    /// Uniform double in `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform double in `(0, 1]`; safe as a logarithm argument.
    #[inline]
    pub fn next_f64_open0(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal variate (ziggurat).
    #[inline]
    pub fn next_gaussian(&mut self) -> f64 {
        StandardNormal.sample(self)
    }
}

impl RngCore for SplitMix64 {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        SplitMix64::next_u64(self)
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        rand_core::impls::fill_bytes_via_next(self, dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand_core::Error> {
        self.fill_bytes(dest);
        Ok(())
    }
}

/// Hash `(seed, stream, index)` into a 64-bit key.
///
/// Used to seed one short-lived [`SplitMix64`] per pixel; distinct streams
/// (capture index, purpose tag) never share keys in practice.
#[inline]
pub fn counter_key(seed: u64, stream: u64, index: u64) -> u64 {
    let s = mix64(seed.wrapping_add(GOLDEN_GAMMA));
    let s = mix64(s ^ stream.wrapping_mul(MIX_1));
    mix64(s ^ index.wrapping_mul(MIX_2).wrapping_add(GOLDEN_GAMMA))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_stream_seed_zero() {
        // Published SplitMix64 outputs for seed 0.
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(rng.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(rng.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn bounded_draws_stay_in_range() {
        let mut rng = SplitMix64::new(7);
        for bound in 1..200u64 {
            for _ in 0..50 {
                assert!(rng.next_below(bound) < bound);
            }
        }
        // Bound of one consumes a draw and returns zero.
        assert_eq!(rng.next_below(1), 0);
    }

    #[test]
    fn unit_interval_draws() {
        let mut rng = SplitMix64::new(99);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let u = rng.next_f64();
            assert!((0.0..1.0).contains(&u));
            let v = rng.next_f64_open0();
            assert!(v > 0.0 && v <= 1.0);
            sum += u;
        }
        assert!((sum / n as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn gaussian_moments() {
        let mut rng = SplitMix64::new(3);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| rng.next_gaussian()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn counter_keys_differ_by_stream_and_index() {
        let a = counter_key(1, 0, 0);
        assert_ne!(a, counter_key(1, 1, 0));
        assert_ne!(a, counter_key(1, 0, 1));
        assert_ne!(a, counter_key(2, 0, 0));
        assert_eq!(a, counter_key(1, 0, 0));
    }
}
