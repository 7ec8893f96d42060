//! Collision statistics for an oversubscribed switch with static
//! destination routing: `n` destination nodes share `k` output ports, each
//! port serving one or two destinations. When `k` simultaneous messages pick
//! a random k-subset of destinations, a port asked to deliver two of them is
//! a collision.
//!
//! The analytic identities are exact, so they are carried as reduced
//! rationals and tested with zero tolerance; brute-force subset enumeration
//! and Monte Carlo traffic simulation provide the independent checks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// An oversubscribed switch: `inbound` destinations routed through
/// `outbound` ports, with `outbound <= inbound <= 2 * outbound`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SwitchGeometry {
    inbound: u64,
    outbound: u64,
}

impl SwitchGeometry {
    pub fn new(inbound: u64, outbound: u64) -> Result<Self> {
        if outbound == 0 {
            return Err(Error::InvalidGeometry("outbound port count must be positive".into()));
        }
        if inbound < outbound || inbound > 2 * outbound {
            return Err(Error::InvalidGeometry(format!(
                "each output port serves 1 or 2 destinations, which requires \
                 outbound <= inbound <= 2*outbound; got inbound={inbound}, outbound={outbound}"
            )));
        }
        Ok(Self { inbound, outbound })
    }

    /// Number of destination nodes (n).
    pub fn inbound(&self) -> u64 {
        self.inbound
    }

    /// Number of output ports (k).
    pub fn outbound(&self) -> u64 {
        self.outbound
    }

    /// Total port count of the switch, n + k.
    pub fn total_ports(&self) -> u64 {
        self.inbound + self.outbound
    }

    /// n - k: the number of ports that must serve two destinations.
    pub fn oversubscription(&self) -> u64 {
        self.inbound - self.outbound
    }
}

/// Static routing table: which output port each destination uses.
///
/// Exactly `n - k` ports are "double" (two destinations) and `2k - n`
/// "single"; no port has zero or three.
#[derive(Clone, Debug)]
pub struct PortMap {
    geometry: SwitchGeometry,
    destination_to_port: Vec<u64>,
}

impl PortMap {
    /// Canonical deterministic map: destination pairs (0,1), (2,3), ... fill
    /// the double ports, the remaining destinations map one-to-one onto the
    /// single ports.
    pub fn canonical(geometry: SwitchGeometry) -> Self {
        let order: Vec<u64> = (0..geometry.inbound()).collect();
        Self::with_destination_order(geometry, &order).expect("identity order is a permutation")
    }

    /// Same port structure with destinations taken in the given order; any
    /// fixed order yields identical collision statistics because uniform
    /// subsets are exchangeable over destination labels.
    pub fn with_destination_order(geometry: SwitchGeometry, order: &[u64]) -> Result<Self> {
        let n = geometry.inbound();
        let doubles = geometry.oversubscription();
        let mut seen = vec![false; n as usize];
        for &d in order {
            if d >= n || seen[d as usize] {
                return Err(Error::InvalidArgument(format!(
                    "destination order must be a permutation of 0..{n}"
                )));
            }
            seen[d as usize] = true;
        }
        if order.len() as u64 != n {
            return Err(Error::InvalidArgument(format!(
                "destination order must be a permutation of 0..{n}"
            )));
        }
        let mut destination_to_port = vec![0u64; n as usize];
        for (pos, &dest) in order.iter().enumerate() {
            let pos = pos as u64;
            let port = if pos < 2 * doubles { pos / 2 } else { doubles + (pos - 2 * doubles) };
            destination_to_port[dest as usize] = port;
        }
        Ok(Self { geometry, destination_to_port })
    }

    pub fn geometry(&self) -> &SwitchGeometry {
        &self.geometry
    }

    /// Output port for a destination.
    pub fn port_of(&self, destination: u64) -> u64 {
        self.destination_to_port[destination as usize]
    }

    /// Number of ports receiving two of the given destination messages.
    pub fn collisions(&self, destinations: &[u64]) -> u64 {
        let k = self.geometry.outbound() as usize;
        let mut load = vec![0u8; k];
        let mut collisions = 0u64;
        for &d in destinations {
            let p = self.destination_to_port[d as usize] as usize;
            load[p] += 1;
            if load[p] == 2 {
                collisions += 1;
            }
        }
        collisions
    }
}

fn big_binomial(n: u64, k: u64) -> BigInt {
    let mut result = BigInt::one();
    let k = k.min(n - k);
    for i in 0..k {
        result = result * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    result
}

/// Exact probability that `k` messages to a uniform k-subset of the `n`
/// destinations see no port collision: `2^(n-k) / C(n,k)`, reduced.
pub fn no_collision_probability(geom: &SwitchGeometry) -> BigRational {
    let doubles = geom.oversubscription();
    let numer = BigInt::one() << doubles;
    BigRational::new(numer, big_binomial(geom.inbound(), geom.outbound()))
}

/// Exact ratio `P(n) / P(n-1) = 2(n-k) / n` anchored at `P(k) = 1`.
/// Undefined at `n = k`.
pub fn recurrence_ratio(inbound: u64, outbound: u64) -> Result<BigRational> {
    if inbound <= outbound || inbound > 2 * outbound {
        return Err(Error::InvalidArgument(format!(
            "recurrence ratio requires k < n <= 2k, got n={inbound}, k={outbound}"
        )));
    }
    Ok(BigRational::new(
        BigInt::from(2 * (inbound - outbound)),
        BigInt::from(inbound),
    ))
}

/// Closed form for two-way oversubscription (`n = k + 2`, `k >= 2`):
/// `8 / ((k+1)(k+2))`, equivalently `32 / (p(p+2))` with `p = 2k + 2`.
pub fn closed_form_two_way(outbound: u64) -> Result<BigRational> {
    if outbound < 2 {
        return Err(Error::InvalidArgument(format!(
            "two-way oversubscription requires k >= 2, got k={outbound}"
        )));
    }
    Ok(BigRational::new(
        BigInt::from(8u64),
        BigInt::from((outbound + 1) * (outbound + 2)),
    ))
}

/// Closed form for one-way oversubscription (`n = k + 1`, `k >= 2`):
/// `2 / (k+1)`.
pub fn closed_form_one_way(outbound: u64) -> Result<BigRational> {
    if outbound < 2 {
        return Err(Error::InvalidArgument(format!(
            "one-way oversubscription requires k >= 2, got k={outbound}"
        )));
    }
    Ok(BigRational::new(BigInt::from(2u64), BigInt::from(outbound + 1)))
}

/// Cap on `C(n,k)` for the brute-force enumeration.
pub const ENUMERATE_CAP: u64 = 10_000_000;

/// Iterate every k-subset of the n destinations through the routing table
/// and count the collision-free ones. Returns `(favorable, total)` with
/// `total = C(n,k)`; the quotient equals `no_collision_probability` exactly.
pub fn enumerate_exact(geom: &SwitchGeometry) -> Result<(u64, u64)> {
    enumerate_exact_with_map(&PortMap::canonical(*geom))
}

/// Brute-force count through an arbitrary routing table.
pub fn enumerate_exact_with_map(map: &PortMap) -> Result<(u64, u64)> {
    let geom = map.geometry();
    let n = geom.inbound();
    let k = geom.outbound();
    let total = big_binomial(n, k);
    let Some(total) = total.to_u64().filter(|&t| t <= ENUMERATE_CAP) else {
        return Err(Error::EnumerationCap {
            detail: format!("C({n},{k}) subsets"),
            cap: ENUMERATE_CAP,
        });
    };
    if n >= 64 {
        return Err(Error::EnumerationCap {
            detail: format!("{n} destinations (bitmask enumeration limit 63)"),
            cap: 63,
        });
    }
    // Bitmask per double port: a subset collides iff it fully contains one.
    let pair_masks: Vec<u64> = (0..k)
        .filter_map(|port| {
            let members: Vec<u64> = (0..n).filter(|&d| map.port_of(d) == port).collect();
            (members.len() == 2).then(|| members.iter().map(|&d| 1u64 << d).sum())
        })
        .collect();

    // Gosper's hack walks the C(n,k) masks in lexicographic order.
    let mut favorable = 0u64;
    let mut visited = 0u64;
    let mut subset: u64 = (1u64 << k) - 1;
    let limit: u64 = 1u64 << n;
    while subset < limit {
        visited += 1;
        if pair_masks.iter().all(|&pm| subset & pm != pm) {
            favorable += 1;
        }
        let c = subset & subset.wrapping_neg();
        let r = subset + c;
        subset = (((r ^ subset) >> 2) / c) | r;
        if c == 0 {
            break;
        }
    }
    debug_assert_eq!(visited, total);
    Ok((favorable, total))
}

/// Result of a Monte Carlo traffic experiment.
#[derive(Clone, Debug)]
pub struct CollisionReport {
    pub trials: u64,
    pub seed: u64,
    pub no_collision_frequency: f64,
    pub no_collision_std_error: f64,
    /// `histogram[c]` = trials that saw exactly `c` double-booked ports;
    /// support is `0..=n-k`.
    pub collision_histogram: Vec<u64>,
}

const TRIALS_PER_CHUNK: u64 = 4096;

/// Per trial, draw a uniform k-subset of destinations through the canonical
/// routing table and count double-booked ports. Same counter-based seeding
/// contract as the cache simulator: results are independent of worker count.
pub fn simulate_traffic(geom: &SwitchGeometry, trials: u64, seed: u64) -> CollisionReport {
    assert!(trials >= 1, "trials must be positive");
    let map = PortMap::canonical(*geom);
    let hist_len = geom.oversubscription() as usize + 1;
    let chunks = trials.div_ceil(TRIALS_PER_CHUNK);

    let (no_collision, histogram) = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * TRIALS_PER_CHUNK;
            let hi = (lo + TRIALS_PER_CHUNK).min(trials);
            let mut hist = vec![0u64; hist_len];
            let mut clean = 0u64;
            for trial in lo..hi {
                let mut rng = SplitMix64::for_trial(seed, trial);
                let picks = rng.sample_distinct(geom.inbound(), geom.outbound() as usize);
                let c = map.collisions(&picks);
                hist[c as usize] += 1;
                clean += (c == 0) as u64;
            }
            (clean, hist)
        })
        .reduce(
            || (0, vec![0u64; hist_len]),
            |(ca, mut ha), (cb, hb)| {
                for (a, b) in ha.iter_mut().zip(&hb) {
                    *a += b;
                }
                (ca + cb, ha)
            },
        );

    let freq = no_collision as f64 / trials as f64;
    CollisionReport {
        trials,
        seed,
        no_collision_frequency: freq,
        no_collision_std_error: (freq * (1.0 - freq) / trials as f64).sqrt(),
        collision_histogram: histogram,
    }
}

/// Which single-parameter family to sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMode {
    /// `n = k + 1`: probability `2/(k+1)`.
    OneWay,
    /// `n = k + 2`: probability `8/((k+1)(k+2))`.
    TwoWay,
}

/// `(k, no-collision probability)` rows over an inclusive range of port
/// counts, for plotting.
pub fn sweep_oversubscription(mode: SweepMode, k_min: u64, k_max: u64) -> Result<Vec<(u64, BigRational)>> {
    if k_min < 2 {
        return Err(Error::InvalidArgument("sweep requires k >= 2".into()));
    }
    if k_max < k_min {
        return Err(Error::InvalidArgument("k_max must be at least k_min".into()));
    }
    (k_min..=k_max)
        .map(|k| {
            let p = match mode {
                SweepMode::OneWay => closed_form_one_way(k)?,
                SweepMode::TwoWay => closed_form_two_way(k)?,
            };
            Ok((k, p))
        })
        .collect()
}

/// Render an exact rational to `f64` for display.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
    })
}
