//! Analytic model of a k-way set-associative cache under uniformly random
//! address-to-set mapping.
//!
//! Two quantities are computed. The expected number of stored addresses when
//! the cache is filled to capacity follows from the binomial occupancy of a
//! single set. The probability that `A` random addresses produce no conflict
//! (no set receives more than `k` of them) is exact; the primary route
//! evaluates it as a truncated-exponential generating-function power in log
//! space, and a literal occupancy-vector sum over small instances serves as
//! an independent cross-check.

use crate::comb::{ln_binomial_pmf, ln_factorial};
use crate::error::{Error, Result};
use crate::logreal::{log_sum_exp, LogReal};
use crate::scalar::{real, Real};

/// A set-associative cache: `sets` sets of `associativity` lines each.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CacheGeometry {
    sets: u64,
    associativity: u64,
}

impl CacheGeometry {
    pub fn new(sets: u64, associativity: u64) -> Result<Self> {
        if sets == 0 || associativity == 0 {
            return Err(Error::InvalidGeometry(format!(
                "sets and associativity must be positive, got sets={sets}, associativity={associativity}"
            )));
        }
        Ok(Self { sets, associativity })
    }

    pub fn sets(&self) -> u64 {
        self.sets
    }

    pub fn associativity(&self) -> u64 {
        self.associativity
    }

    /// Total number of lines, `sets * associativity`.
    pub fn capacity(&self) -> u64 {
        self.sets * self.associativity
    }
}

/// Number of distinct random addresses assigned to the cache.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WorkingSetQuery {
    pub addresses: u64,
}

/// Counts `i_0..i_k` of sets holding exactly `j` addresses; one term of the
/// exact no-conflict sum.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OccupancyVector {
    counts: Vec<u64>,
}

impl OccupancyVector {
    /// `counts[j]` = number of sets with exactly `j` addresses.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Sums to the number of sets.
    pub fn sets_total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Sums to the number of assigned addresses.
    pub fn addresses_total(&self) -> u64 {
        self.counts.iter().enumerate().map(|(j, &i)| j as u64 * i).sum()
    }
}

/// Expected number of addresses stored in one set when `n = m*k` random
/// addresses map to `m` sets of associativity `k`:
///
/// `E[Y] = k - sum_{j<k} (k-j) C(n,j) (1/m)^j (1-1/m)^(n-j)`
///
/// The single-set cache is degenerate (every address maps to it, the set
/// fills exactly) and bypasses the binomial.
pub fn expected_set_occupancy<F: Real>(geom: &CacheGeometry) -> F {
    let m = geom.sets();
    let k = geom.associativity();
    if m == 1 {
        return real(k as f64);
    }
    let n = geom.capacity();
    let q = F::one() / real::<F>(m as f64);
    let mut shortfall = F::zero();
    for j in 0..k {
        let pmf = ln_binomial_pmf::<F>(n, j, q).expect("0 < 1/m < 1 for m >= 2");
        shortfall = shortfall + real::<F>((k - j) as f64) * pmf.value();
    }
    real::<F>(k as f64) - shortfall
}

/// Expected total stored count, `m * E[Y]`.
pub fn expected_stored<F: Real>(geom: &CacheGeometry) -> F {
    real::<F>(geom.sets() as f64) * expected_set_occupancy(geom)
}

/// Expected stored count as a fraction of capacity. Depends on the
/// associativity and only weakly on the number of sets.
pub fn expected_fraction<F: Real>(associativity: u64, sets: u64) -> Result<F> {
    let geom = CacheGeometry::new(sets, associativity)?;
    Ok(expected_set_occupancy::<F>(&geom) / real(associativity as f64))
}

/// Probability that no set receives more than `k` of `A` uniform independent
/// addresses.
///
/// Evaluated as `A! m^-A [x^A] (sum_{j<=k} x^j/j!)^m`: the polynomial power
/// is built by `m` successive log-space convolutions with fixed summation
/// order. Identically 1 for `A <= k`, exact zero beyond capacity.
pub fn no_conflict_probability<F: Real>(geom: &CacheGeometry, query: &WorkingSetQuery) -> LogReal<F> {
    let m = geom.sets();
    let k = geom.associativity() as usize;
    let a = query.addresses;
    if a <= k as u64 {
        return LogReal::one();
    }
    if a > geom.capacity() {
        return LogReal::zero();
    }
    let a = a as usize;

    // One set contributes x^j/j! for each admissible occupancy j.
    let base: Vec<LogReal<F>> = (0..=k)
        .map(|j| LogReal::from_ln(-ln_factorial::<F>(j as u64)))
        .collect();

    let mut coeffs: Vec<LogReal<F>> = vec![LogReal::one()];
    let mut terms: Vec<LogReal<F>> = Vec::with_capacity(k + 1);
    for _ in 0..m {
        let degree = (coeffs.len() - 1 + k).min(a);
        let mut next = Vec::with_capacity(degree + 1);
        for d in 0..=degree {
            terms.clear();
            let j_lo = d.saturating_sub(coeffs.len() - 1);
            for j in j_lo..=k.min(d) {
                let c = coeffs[d - j];
                if !c.is_zero() {
                    terms.push(c * base[j]);
                }
            }
            next.push(log_sum_exp(&terms));
        }
        coeffs = next;
    }

    let ln_scale = ln_factorial::<F>(a as u64) - real::<F>(a as f64) * real::<F>(m as f64).ln();
    coeffs[a] * LogReal::from_ln(ln_scale)
}

/// Default cap on the number of occupancy vectors the direct route will sum.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

/// Every occupancy vector with `sum i_j = m` sets and `sum j*i_j = A`
/// addresses, each exactly once. Intended for small instances; the vector
/// count grows combinatorially.
pub fn enumerate_occupancy_vectors(geom: &CacheGeometry, addresses: u64) -> Vec<OccupancyVector> {
    let mut out = Vec::new();
    // No cap: the caller opted into full materialization.
    visit_occupancy_vectors(geom.sets(), geom.associativity(), addresses, None, &mut |counts| {
        out.push(OccupancyVector { counts: counts.to_vec() });
    })
    .expect("uncapped enumeration cannot hit a cap");
    out
}

/// Literal evaluation of the occupancy-vector sum
/// `sum m!/(prod i_j!) * A!/(prod (j!)^{i_j}) / m^A`, all in log space.
///
/// Exists as an independent cross-check of the generating-function route;
/// rejects instances whose vector count exceeds `DEFAULT_ENUMERATION_CAP`.
pub fn no_conflict_probability_direct<F: Real>(
    geom: &CacheGeometry,
    query: &WorkingSetQuery,
) -> Result<LogReal<F>> {
    no_conflict_probability_direct_capped(geom, query, DEFAULT_ENUMERATION_CAP)
}

/// Direct route with an explicit vector-count cap.
pub fn no_conflict_probability_direct_capped<F: Real>(
    geom: &CacheGeometry,
    query: &WorkingSetQuery,
    cap: u64,
) -> Result<LogReal<F>> {
    let m = geom.sets();
    let k = geom.associativity();
    let a = query.addresses;
    if a > geom.capacity() {
        return Ok(LogReal::zero());
    }
    let ln_m_fact = ln_factorial::<F>(m);
    let ln_a_fact = ln_factorial::<F>(a);
    let ln_m = real::<F>(m as f64).ln();
    let mut terms: Vec<LogReal<F>> = Vec::new();
    visit_occupancy_vectors(m, k, a, Some(cap), &mut |counts| {
        let mut ln = ln_m_fact + ln_a_fact - real::<F>(a as f64) * ln_m;
        for (j, &count) in counts.iter().enumerate() {
            ln = ln - ln_factorial::<F>(count);
            ln = ln - real::<F>(count as f64) * ln_factorial::<F>(j as u64);
        }
        terms.push(LogReal::from_ln(ln));
    })?;
    Ok(log_sum_exp(&terms))
}

/// Constrained recursion over `i_k, i_{k-1}, ..., i_2`; `i_1` and `i_0` are
/// then forced. At each level the remaining address count must stay
/// nonnegative and must still fit in the remaining sets at the lower
/// occupancies, which prunes infeasible branches exactly.
fn visit_occupancy_vectors(
    m: u64,
    k: u64,
    addresses: u64,
    cap: Option<u64>,
    f: &mut impl FnMut(&[u64]),
) -> Result<()> {
    let mut counts = vec![0u64; k as usize + 1];
    let mut emitted = 0u64;
    descend(k, m, addresses, &mut counts, cap, &mut emitted, f)
}

fn descend(
    j: u64,
    sets_left: u64,
    addrs_left: u64,
    counts: &mut [u64],
    cap: Option<u64>,
    emitted: &mut u64,
    f: &mut impl FnMut(&[u64]),
) -> Result<()> {
    if j <= 1 {
        // i_1 is the remaining address count, i_0 the remaining sets.
        if addrs_left <= sets_left {
            counts[1] = addrs_left;
            counts[0] = sets_left - addrs_left;
            *emitted += 1;
            if let Some(cap) = cap {
                if *emitted > cap {
                    return Err(Error::EnumerationCap {
                        detail: "occupancy vector count".into(),
                        cap,
                    });
                }
            }
            f(counts);
        }
        return Ok(());
    }
    // Feasibility: after taking i sets at occupancy j, the rest must fit at
    // occupancy <= j-1, so addrs_left - j*i <= (j-1)*(sets_left - i).
    let min_i = addrs_left.saturating_sub((j - 1) * sets_left);
    let max_i = sets_left.min(addrs_left / j);
    for i in min_i..=max_i {
        counts[j as usize] = i;
        descend(j - 1, sets_left - i, addrs_left - j * i, counts, cap, emitted, f)?;
    }
    counts[j as usize] = 0;
    Ok(())
}
