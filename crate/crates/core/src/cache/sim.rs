//! Monte Carlo random-fill simulator: the empirical counterpart of the
//! analytic expected-stored and no-conflict results, used as their
//! independent oracle.

use rayon::prelude::*;

use crate::cache::model::CacheGeometry;
use crate::rng::SplitMix64;

/// Configuration of one random-fill experiment.
#[derive(Clone, Copy, Debug)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    pub geometry: CacheGeometry,
}

/// Aggregated result of a random-fill experiment.
#[derive(Clone, Debug)]
pub struct SimReport {
    pub trials: u64,
    pub seed: u64,
    /// Mean over trials of the number of addresses actually stored.
    pub mean_stored: f64,
    /// Standard error of `mean_stored` (sample standard deviation / sqrt(trials)).
    pub mean_stored_std_error: f64,
    /// Fraction of trials in which every set received at most k addresses.
    pub no_conflict_frequency: f64,
    /// Binomial standard error of the frequency.
    pub no_conflict_std_error: f64,
    /// `histogram[j]` = number of (trial, set) pairs where the set received
    /// exactly `j` addresses; totals `trials * m`.
    pub occupancy_histogram: Vec<u64>,
}

/// Integer accumulator; merging is associative and commutative, so the
/// result is bitwise independent of how trials are partitioned over workers.
struct Tally {
    stored_sum: u64,
    stored_sq_sum: u128,
    no_conflict: u64,
    histogram: Vec<u64>,
}

impl Tally {
    fn new(hist_len: usize) -> Self {
        Self {
            stored_sum: 0,
            stored_sq_sum: 0,
            no_conflict: 0,
            histogram: vec![0; hist_len],
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.stored_sum += other.stored_sum;
        self.stored_sq_sum += other.stored_sq_sum;
        self.no_conflict += other.no_conflict;
        for (a, b) in self.histogram.iter_mut().zip(&other.histogram) {
            *a += b;
        }
        self
    }
}

const TRIALS_PER_CHUNK: u64 = 1024;

/// Draw `addresses` uniform set indices per trial, store up to `k` per set,
/// and tally stored counts, the no-conflict frequency, and the occupancy
/// histogram.
///
/// Each trial's randomness is derived from (seed, trial index) alone, so the
/// report is identical for any worker count or execution order.
pub fn simulate_random_fill(config: &SimConfig, addresses: u64) -> SimReport {
    assert!(config.trials >= 1, "trials must be positive");
    let m = config.geometry.sets();
    let k = config.geometry.associativity();
    let hist_len = addresses as usize + 1;
    let chunks = config.trials.div_ceil(TRIALS_PER_CHUNK);

    let tally = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * TRIALS_PER_CHUNK;
            let hi = (lo + TRIALS_PER_CHUNK).min(config.trials);
            let mut tally = Tally::new(hist_len);
            let mut counts = vec![0u32; m as usize];
            let mut touched: Vec<u64> = Vec::with_capacity(addresses as usize);
            for trial in lo..hi {
                let mut rng = SplitMix64::for_trial(config.seed, trial);
                touched.clear();
                for _ in 0..addresses {
                    let set = rng.next_below(m);
                    if counts[set as usize] == 0 {
                        touched.push(set);
                    }
                    counts[set as usize] += 1;
                }
                let mut stored = 0u64;
                let mut conflict_free = true;
                for &set in &touched {
                    let c = counts[set as usize] as u64;
                    stored += c.min(k);
                    conflict_free &= c <= k;
                    tally.histogram[c as usize] += 1;
                    counts[set as usize] = 0;
                }
                tally.histogram[0] += m - touched.len() as u64;
                tally.stored_sum += stored;
                tally.stored_sq_sum += (stored as u128) * (stored as u128);
                tally.no_conflict += conflict_free as u64;
            }
            tally
        })
        .reduce(|| Tally::new(hist_len), Tally::merge);

    let t = config.trials as f64;
    let mean = tally.stored_sum as f64 / t;
    let variance = if config.trials > 1 {
        let sq = tally.stored_sq_sum as f64;
        ((sq - (tally.stored_sum as f64) * mean) / (t - 1.0)).max(0.0)
    } else {
        0.0
    };
    let freq = tally.no_conflict as f64 / t;
    SimReport {
        trials: config.trials,
        seed: config.seed,
        mean_stored: mean,
        mean_stored_std_error: (variance / t).sqrt(),
        no_conflict_frequency: freq,
        no_conflict_std_error: (freq * (1.0 - freq) / t).sqrt(),
        occupancy_histogram: tally.histogram,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cache::model::{expected_stored, no_conflict_probability, WorkingSetQuery};

    fn config(m: u64, k: u64, trials: u64, seed: u64) -> SimConfig {
        SimConfig {
            trials,
            seed,
            geometry: CacheGeometry::new(m, k).unwrap(),
        }
    }

    #[test]
    fn single_set_exactly_filled() {
        let report = simulate_random_fill(&config(1, 5, 100, 1), 5);
        assert_eq!(report.mean_stored, 5.0);
        assert_eq!(report.no_conflict_frequency, 1.0);
        assert_eq!(report.mean_stored_std_error, 0.0);
    }

    #[test]
    fn histogram_invariants() {
        let (m, a, trials) = (17u64, 40u64, 2000u64);
        let report = simulate_random_fill(&config(m, 3, trials, 9), a);
        let total: u64 = report.occupancy_histogram.iter().sum();
        assert_eq!(total, trials * m);
        let weighted: u64 = report
            .occupancy_histogram
            .iter()
            .enumerate()
            .map(|(j, &c)| j as u64 * c)
            .sum();
        assert_eq!(weighted, trials * a);
    }

    #[test]
    fn two_sets_coin_flip() {
        let trials = 100_000;
        let report = simulate_random_fill(&config(2, 1, trials, 31), 2);
        // Exact probability 1/2; allow 4 standard errors.
        let se = (0.5 * 0.5 / trials as f64).sqrt();
        assert!((report.no_conflict_frequency - 0.5).abs() <= 4.0 * se);
    }

    #[test]
    fn converges_to_analytic_expectation() {
        let cfg = config(100, 2, 50_000, 7);
        let report = simulate_random_fill(&cfg, 200);
        let analytic = expected_stored::<f64>(&cfg.geometry);
        assert!(
            (report.mean_stored - analytic).abs() <= 4.0 * report.mean_stored_std_error,
            "{} vs {analytic} (se {})",
            report.mean_stored,
            report.mean_stored_std_error
        );
    }

    #[test]
    fn frequency_matches_analytic_probability() {
        let cfg = config(20, 2, 100_000, 12);
        let report = simulate_random_fill(&cfg, 20);
        let p = no_conflict_probability::<f64>(&cfg.geometry, &WorkingSetQuery { addresses: 20 }).value();
        let se = (p * (1.0 - p) / cfg.trials as f64).sqrt();
        assert!(
            (report.no_conflict_frequency - p).abs() <= 4.0 * se,
            "{} vs {p}",
            report.no_conflict_frequency
        );
    }

    #[test]
    fn identical_for_any_worker_count() {
        let cfg = config(50, 2, 10_000, 77);
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| simulate_random_fill(&cfg, 60));
        let parallel = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| simulate_random_fill(&cfg, 60));
        assert_eq!(serial.mean_stored.to_bits(), parallel.mean_stored.to_bits());
        assert_eq!(
            serial.no_conflict_frequency.to_bits(),
            parallel.no_conflict_frequency.to_bits()
        );
        assert_eq!(serial.occupancy_histogram, parallel.occupancy_histogram);
    }

    #[test]
    fn different_seeds_differ() {
        let a = simulate_random_fill(&config(100, 2, 2000, 1), 150);
        let b = simulate_random_fill(&config(100, 2, 2000, 2), 150);
        assert_ne!(a.occupancy_histogram, b.occupancy_histogram);
    }
}
