//! Deterministic counter-based randomness for the Monte Carlo oracles.
//!
//! Each trial derives its own stream by mixing (master seed, trial index)
//! through the splitmix64 finalizer, so trials can be executed in any order
//! or partition with bitwise-identical results. Output is stable across
//! platforms; this is not cryptographic randomness.

/// splitmix64 finalizer (Stafford's mix13 constants).
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// splitmix64 generator with a 64-bit counter state.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Independent stream for one trial of a seeded experiment.
    pub fn for_trial(master_seed: u64, trial: u64) -> Self {
        Self::new(mix64(master_seed ^ mix64(trial.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA))))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform draw from `[0, bound)` by rejection (no modulo bias).
    #[inline]
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let r = self.next_u64();
            if r >= threshold {
                return r % bound;
            }
        }
    }

    /// First `take` elements of a uniform random permutation of `0..len`
    /// (partial Fisher-Yates).
    pub fn sample_distinct(&mut self, len: u64, take: usize) -> Vec<u64> {
        assert!(take as u64 <= len);
        let mut pool: Vec<u64> = (0..len).collect();
        for i in 0..take {
            let j = i as u64 + self.next_below(len - i as u64);
            pool.swap(i, j as usize);
        }
        pool.truncate(take);
        pool
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let a: Vec<u64> = (0..8).map(|i| SplitMix64::for_trial(42, i).next_u64()).collect();
        let b: Vec<u64> = (0..8).map(|i| SplitMix64::for_trial(42, i).next_u64()).collect();
        assert_eq!(a, b);
        let c: Vec<u64> = (0..8).map(|i| SplitMix64::for_trial(43, i).next_u64()).collect();
        assert_ne!(a, c);
    }

    #[test]
    fn next_below_stays_in_range_and_covers() {
        let mut rng = SplitMix64::new(7);
        let mut seen = [false; 10];
        for _ in 0..1000 {
            let v = rng.next_below(10);
            assert!(v < 10);
            seen[v as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn sample_distinct_yields_distinct() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..100 {
            let mut s = rng.sample_distinct(20, 12);
            s.sort_unstable();
            s.dedup();
            assert_eq!(s.len(), 12);
        }
    }
}
