//! Stateless counter-based random numbers.
//!
//! Every variate is a pure function of `(seed, index, key)`, so lattice sites and
//! realizations can be drawn in any order, on any number of threads, with
//! bit-identical results. The mixing function is the SplitMix64 finalizer.
//!
//! A lattice site is absorbed coordinate by coordinate after zig-zag sign
//! folding (`0, -1, 1, -2, ... -> 0, 1, 2, 3, ...`):
//!
//! ```text
//! s = mix(seed ^ GOLDEN)
//! s = mix(s + GOLDEN * (index + 1))
//! for c in site: s = mix((s + GOLDEN) ^ zigzag(c))
//! ```

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
pub fn zigzag(v: i64) -> u64 {
    ((v << 1) ^ (v >> 63)) as u64
}

#[inline]
pub fn stream_key(seed: u64, index: u64) -> u64 {
    let s = mix64(seed ^ GOLDEN);
    mix64(s.wrapping_add(GOLDEN.wrapping_mul(index.wrapping_add(1))))
}

#[inline]
pub fn site_bits(key: u64, coords: &[i64]) -> u64 {
    coords
        .iter()
        .fold(key, |s, &c| mix64(s.wrapping_add(GOLDEN) ^ zigzag(c)))
}

/// Maps 64 random bits to the open interval (0, 1).
#[inline]
pub fn unit_open(bits: u64) -> f64 {
    // 52 bits keep (2^52 - 1/2) / 2^52 strictly below 1.
    ((bits >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// Uniform variate attached to `(seed, index, site)`.
pub fn site_uniform(seed: u64, index: u64, coords: &[i64]) -> f64 {
    unit_open(site_bits(stream_key(seed, index), coords))
}

/// Sequential view on a counter stream, for consumers that just need "the next
/// number" (bootstrap resampling, random test instances).
#[derive(Clone, Debug)]
pub struct CounterStream {
    key: u64,
    counter: u64,
}

impl CounterStream {
    pub fn new(seed: u64, index: u64) -> Self {
        CounterStream {
            key: stream_key(seed, index),
            counter: 0,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key ^ mix64(self.counter.wrapping_mul(GOLDEN)))
    }

    pub fn next_f64(&mut self) -> f64 {
        unit_open(self.next_u64())
    }

    /// Uniform integer in `0..n` (`n > 0`).
    pub fn below(&mut self, n: usize) -> usize {
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_values() {
        // SplitMix64 seeded with 0 emits mix64(GOLDEN), mix64(2 GOLDEN), ...
        assert_eq!(mix64(GOLDEN), 0xe220_a839_7b1d_cdaf);
        assert_eq!(mix64(GOLDEN.wrapping_mul(2)), 0x6e78_9e6a_a1b9_65f4);
    }

    #[test]
    fn zigzag_folds_signs() {
        let folded: Vec<u64> = [0, -1, 1, -2, 2].iter().map(|&v| zigzag(v)).collect();
        assert_eq!(folded, vec![0, 1, 2, 3, 4]);
        assert_eq!(zigzag(i64::MIN), u64::MAX);
    }

    #[test]
    fn unit_open_never_hits_endpoints() {
        assert!(unit_open(0) > 0.0);
        assert!(unit_open(u64::MAX) < 1.0);
    }

    #[test]
    fn site_variates_depend_on_every_input() {
        let base = site_uniform(7, 0, &[1, 2]);
        assert_ne!(base, site_uniform(8, 0, &[1, 2]));
        assert_ne!(base, site_uniform(7, 1, &[1, 2]));
        assert_ne!(base, site_uniform(7, 0, &[2, 1]));
        assert_ne!(base, site_uniform(7, 0, &[1, 2, 0]));
        assert_eq!(base, site_uniform(7, 0, &[1, 2]));
    }

    #[test]
    fn below_is_in_range() {
        let mut s = CounterStream::new(3, 4);
        for _ in 0..1000 {
            assert!(s.below(7) < 7);
        }
    }
}
