//! Seeded, splittable pseudo-randomness for reproducible experiments.
//!
//! Everything stochastic in this crate draws from [`SplitMix64`], seeded
//! per trial as `mix(master_seed ^ STREAM, trial_index)`. Because each
//! trial owns an independent stream derived only from `(master_seed,
//! trial_index)`, sharding trials across any number of workers cannot
//! change a single drawn bit.
//!
//! The generator is pinned so results stay reproducible across releases:
//!
//! ```text
//! state += 0x9E3779B97F4A7C15                    (golden-ratio increment)
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! output = z ^ (z >> 31)
//! ```
//!
//! `mix(seed, index)` is one output step of the same finalizer applied to
//! `seed ^ (index * GOLDEN)`.

const GOLDEN: u64 = 0x9E3779B97F4A7C15;

#[inline]
fn finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Derive an independent stream seed from a master seed and a counter.
#[inline]
pub fn mix(seed: u64, index: u64) -> u64 {
    finalize(seed ^ index.wrapping_mul(GOLDEN).wrapping_add(GOLDEN))
}

/// SplitMix64 stream.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Stream for trial `index` of an experiment with the given master seed.
    pub fn for_trial(master_seed: u64, index: u64) -> Self {
        Self::new(mix(master_seed, index))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        finalize(self.state)
    }

    /// Uniform draw from `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw from `(0, 1)`: rejects the (probability `2^-53`) zero.
    #[inline]
    pub fn next_f64_open(&mut self) -> f64 {
        loop {
            let u = self.next_f64();
            if u > 0.0 {
                return u;
            }
        }
    }

    /// Uniform index in `0..bound`.
    #[inline]
    pub fn next_index(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        // Bounded rejection keeps the draw exactly uniform.
        let bound = bound as u64;
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let v = self.next_u64();
            if v < zone {
                return (v % bound) as usize;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_deterministic() {
        let mut a = SplitMix64::for_trial(7, 3);
        let mut b = SplitMix64::for_trial(7, 3);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn trial_streams_differ() {
        let mut a = SplitMix64::for_trial(7, 0);
        let mut b = SplitMix64::for_trial(7, 1);
        let same = (0..64).filter(|_| a.next_u64() == b.next_u64()).count();
        assert_eq!(same, 0);
    }

    #[test]
    fn reference_values_are_pinned() {
        // SplitMix64 from seed 0; first outputs of the reference algorithm.
        let mut r = SplitMix64::new(0);
        assert_eq!(r.next_u64(), 0xE220A8397B1DCDAF);
        assert_eq!(r.next_u64(), 0x6E789E6AA1B965F4);
        assert_eq!(r.next_u64(), 0x06C45D188009454F);
    }

    #[test]
    fn f64_in_unit_interval() {
        let mut r = SplitMix64::new(42);
        for _ in 0..1000 {
            let x = r.next_f64();
            assert!((0.0..1.0).contains(&x));
        }
    }
}
