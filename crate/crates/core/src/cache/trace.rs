//! Trace-driven simulation of a set-associative cache with LRU replacement,
//! plus the structured address-stream generators (sequential, strided,
//! multi-array, uniform random, and the paged sweep that reproduces the
//! page-table degradation mechanism).

use crate::cache::model::CacheGeometry;
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// How virtual pages are placed in physical memory for the paged scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PageMapping {
    /// Pages are contiguous: virtual page v sits in frame v.
    Identity,
    /// Pages land on uniformly random distinct frames.
    Permuted { seed: u64 },
}

/// Synthetic access pattern for one repetition of a trace.
#[derive(Clone, Debug)]
pub enum Scenario {
    /// Addresses `0..length`.
    Sequential,
    /// Two interleaved streams at mutual offset `stride`: `i, i+stride` for
    /// each `i`.
    Strided { stride: u64 },
    /// `array_count` interleaved streams at mutual offset
    /// `conflicting_offset` (one output plus several input arrays).
    MultiArray { array_count: u64, conflicting_offset: u64 },
    /// `length` draws uniform over `[0, span)`.
    UniformRandom { span: u64, seed: u64 },
    /// Sequential sweep over a capacity-sized working set of pages, placed
    /// into `page_count` physical frames of `page_size` addresses each by
    /// the given mapping. The physical span `page_count * page_size` must be
    /// at least the cache capacity.
    Paged {
        page_count: u64,
        page_size: u64,
        mapping: PageMapping,
    },
}

/// A repeated synthetic address trace.
#[derive(Clone, Debug)]
pub struct AddressStream {
    pub scenario: Scenario,
    /// Base length of one repetition (per-stream for the interleaved
    /// scenarios; derived from the geometry for `Paged`).
    pub length: u64,
    pub repetitions: u64,
    /// Addresses covered by one cacheline; 1 treats addresses as line units.
    pub line_bytes: u64,
}

/// Exact hit/miss totals of a trace segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceStats {
    pub accesses: u64,
    pub hits: u64,
    pub misses: u64,
}

impl TraceStats {
    pub fn hit_rate(&self) -> f64 {
        if self.accesses == 0 {
            0.0
        } else {
            self.hits as f64 / self.accesses as f64
        }
    }
}

/// Trace totals split into the cold first pass and the steady state
/// (everything after the first repetition).
#[derive(Clone, Copy, Debug)]
pub struct TraceReport {
    pub total: TraceStats,
    pub first_pass: TraceStats,
    pub steady: TraceStats,
}

/// Set-associative cache with true LRU within each set.
struct LruCache {
    sets: Vec<Vec<u64>>,
    ways: usize,
    line_bytes: u64,
}

impl LruCache {
    fn new(geom: &CacheGeometry, line_bytes: u64) -> Self {
        Self {
            sets: vec![Vec::with_capacity(geom.associativity() as usize); geom.sets() as usize],
            ways: geom.associativity() as usize,
            line_bytes,
        }
    }

    fn access(&mut self, address: u64) -> bool {
        let line = address / self.line_bytes;
        let index = (line % self.sets.len() as u64) as usize;
        let tag = line / self.sets.len() as u64;
        let set = &mut self.sets[index];
        if let Some(pos) = set.iter().position(|&t| t == tag) {
            // Most recently used at the front.
            set.remove(pos);
            set.insert(0, tag);
            true
        } else {
            if set.len() == self.ways {
                set.pop();
            }
            set.insert(0, tag);
            false
        }
    }
}

/// Addresses of one repetition of the scenario.
fn generate_repetition(geom: &CacheGeometry, stream: &AddressStream) -> Result<Vec<u64>> {
    if stream.length == 0 && !matches!(stream.scenario, Scenario::Paged { .. }) {
        return Err(Error::InvalidArgument("stream length must be at least 1".into()));
    }
    let mut addrs = Vec::new();
    match &stream.scenario {
        Scenario::Sequential => {
            addrs.extend(0..stream.length);
        }
        Scenario::Strided { stride } => {
            for i in 0..stream.length {
                addrs.push(i);
                addrs.push(i + stride);
            }
        }
        Scenario::MultiArray { array_count, conflicting_offset } => {
            if *array_count == 0 {
                return Err(Error::InvalidArgument("array_count must be at least 1".into()));
            }
            for i in 0..stream.length {
                for j in 0..*array_count {
                    addrs.push(j * conflicting_offset + i);
                }
            }
        }
        Scenario::UniformRandom { span, seed } => {
            if *span == 0 {
                return Err(Error::InvalidArgument("span must be at least 1".into()));
            }
            let mut rng = SplitMix64::new(*seed);
            for _ in 0..stream.length {
                addrs.push(rng.next_below(*span));
            }
        }
        Scenario::Paged { page_count, page_size, mapping } => {
            addrs = paged_sweep(geom, *page_count, *page_size, stream.line_bytes, mapping)?;
        }
    }
    Ok(addrs)
}

/// One sweep over a capacity-sized working set placed by the page table.
///
/// The working set is `capacity / page_size` virtual pages; identity places
/// them contiguously (conflict-free by construction), a permuted table
/// scatters them over all `page_count` frames, which reintroduces random
/// mapping conflicts once the physical span exceeds the capacity.
fn paged_sweep(
    geom: &CacheGeometry,
    page_count: u64,
    page_size: u64,
    line_bytes: u64,
    mapping: &PageMapping,
) -> Result<Vec<u64>> {
    if page_count == 0 || page_size == 0 {
        return Err(Error::InvalidArgument("page_count and page_size must be positive".into()));
    }
    let capacity_units = geom.capacity() * line_bytes;
    let span = page_count * page_size;
    if span < capacity_units {
        return Err(Error::InvalidArgument(format!(
            "paged span {span} is smaller than cache capacity {capacity_units}; degradation not observable"
        )));
    }
    if capacity_units % page_size != 0 {
        return Err(Error::InvalidArgument(format!(
            "page_size {page_size} must divide cache capacity {capacity_units}"
        )));
    }
    let working_pages = capacity_units / page_size;
    let frames: Vec<u64> = match mapping {
        PageMapping::Identity => (0..working_pages).collect(),
        PageMapping::Permuted { seed } => {
            SplitMix64::new(*seed).sample_distinct(page_count, working_pages as usize)
        }
    };
    let mut addrs = Vec::with_capacity((working_pages * page_size) as usize);
    for &frame in &frames {
        for offset in 0..page_size {
            addrs.push(frame * page_size + offset);
        }
    }
    Ok(addrs)
}

/// Run the stream through an LRU set-associative cache.
///
/// Pure in (geometry, stream); cold-start misses land in `first_pass`,
/// `steady` covers repetitions after the first.
pub fn simulate_trace(geom: &CacheGeometry, stream: &AddressStream) -> Result<TraceReport> {
    if stream.repetitions == 0 {
        return Err(Error::InvalidArgument("repetitions must be at least 1".into()));
    }
    if stream.line_bytes == 0 {
        return Err(Error::InvalidArgument("line_bytes must be at least 1".into()));
    }
    let addrs = generate_repetition(geom, stream)?;
    let mut cache = LruCache::new(geom, stream.line_bytes);
    let mut total = TraceStats { accesses: 0, hits: 0, misses: 0 };
    let mut first_pass = total;
    for rep in 0..stream.repetitions {
        for &a in &addrs {
            let hit = cache.access(a);
            total.accesses += 1;
            total.hits += hit as u64;
            total.misses += !hit as u64;
        }
        if rep == 0 {
            first_pass = total;
        }
    }
    let steady = TraceStats {
        accesses: total.accesses - first_pass.accesses,
        hits: total.hits - first_pass.hits,
        misses: total.misses - first_pass.misses,
    };
    Ok(TraceReport { total, first_pass, steady })
}

/// Repeated sweep of a capacity-sized working set under (a) an identity page
/// table and (b) a seeded random page placement, on the given cache.
///
/// Returns `(identity, permuted)`. Once the physical span is at least twice
/// the capacity, the random placement collides with near certainty and the
/// permuted hit rate drops strictly below the identity one.
pub fn simulate_paged_degradation(
    geom: &CacheGeometry,
    page_count: u64,
    page_size: u64,
    seed: u64,
) -> Result<(TraceReport, TraceReport)> {
    let stream = |mapping| AddressStream {
        scenario: Scenario::Paged { page_count, page_size, mapping },
        length: 0,
        repetitions: 3,
        line_bytes: 1,
    };
    let identity = simulate_trace(geom, &stream(PageMapping::Identity))?;
    let permuted = simulate_trace(geom, &stream(PageMapping::Permuted { seed }))?;
    Ok((identity, permuted))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(m: u64, k: u64) -> CacheGeometry {
        CacheGeometry::new(m, k).unwrap()
    }

    fn stream(scenario: Scenario, length: u64, reps: u64) -> AddressStream {
        AddressStream { scenario, length, repetitions: reps, line_bytes: 1 }
    }

    #[test]
    fn sequential_capacity_second_pass_all_hits() {
        // Direct mapped: n contiguous addresses map to each set exactly once.
        let g = geom(64, 1);
        let r = simulate_trace(&g, &stream(Scenario::Sequential, 64, 2)).unwrap();
        assert_eq!(r.first_pass.hits, 0);
        assert_eq!(r.steady.hit_rate(), 1.0);
        // Same for a set-associative layout at full capacity.
        let g = geom(16, 4);
        let r = simulate_trace(&g, &stream(Scenario::Sequential, 64, 3)).unwrap();
        assert_eq!(r.steady.hit_rate(), 1.0);
    }

    #[test]
    fn stride_capacity_conflict_kills_direct_mapped() {
        let g = geom(32, 1);
        let r = simulate_trace(&g, &stream(Scenario::Strided { stride: 32 }, 32, 4)).unwrap();
        assert_eq!(r.steady.hit_rate(), 0.0);
    }

    #[test]
    fn four_conflicting_arrays_fit_a_four_way_cache() {
        let g = geom(16, 4);
        let scenario = Scenario::MultiArray { array_count: 4, conflicting_offset: 64 };
        let r = simulate_trace(&g, &stream(scenario, 16, 3)).unwrap();
        assert_eq!(r.first_pass.hits, 0);
        assert_eq!(r.steady.hit_rate(), 1.0);
        // A fifth conflicting array overflows the set.
        let scenario = Scenario::MultiArray { array_count: 5, conflicting_offset: 64 };
        let r = simulate_trace(&g, &stream(scenario, 16, 3)).unwrap();
        assert_eq!(r.steady.hit_rate(), 0.0);
    }

    #[test]
    fn lru_keeps_k_distinct_lines_resident() {
        let g = geom(1, 2);
        let mut cache = LruCache::new(&g, 1);
        assert!(!cache.access(0));
        assert!(!cache.access(1));
        assert!(cache.access(0));
        assert!(cache.access(1));
        // Third line evicts the least recently used (0).
        assert!(!cache.access(2));
        assert!(!cache.access(0));
    }

    #[test]
    fn line_bytes_group_addresses() {
        let g = geom(8, 1);
        let s = AddressStream {
            scenario: Scenario::Sequential,
            length: 64,
            repetitions: 1,
            line_bytes: 64,
        };
        let r = simulate_trace(&g, &s).unwrap();
        // All 64 byte addresses share one cacheline.
        assert_eq!(r.total.misses, 1);
        assert_eq!(r.total.hits, 63);
    }

    #[test]
    fn uniform_random_is_seed_deterministic() {
        let g = geom(32, 2);
        let s = |seed| stream(Scenario::UniformRandom { span: 256, seed }, 500, 2);
        let a = simulate_trace(&g, &s(5)).unwrap();
        let b = simulate_trace(&g, &s(5)).unwrap();
        assert_eq!(a.total, b.total);
        let c = simulate_trace(&g, &s(6)).unwrap();
        assert_ne!(a.total.hits, c.total.hits);
    }

    #[test]
    fn paged_identity_at_capacity_is_conflict_free() {
        let g = geom(256, 1);
        let (identity, _) = simulate_paged_degradation(&g, 16, 16, 3).unwrap();
        assert_eq!(identity.steady.hit_rate(), 1.0);
    }

    #[test]
    fn paged_permuted_degrades_below_identity() {
        // Physical span twice the capacity: random placement collides.
        let g = geom(4096, 1);
        let (identity, permuted) = simulate_paged_degradation(&g, 128, 64, 42).unwrap();
        assert_eq!(identity.steady.hit_rate(), 1.0);
        assert!(permuted.steady.hit_rate() < identity.steady.hit_rate());
        assert!(permuted.steady.hit_rate() > 0.0);
    }

    #[test]
    fn paged_rejects_span_below_capacity() {
        let g = geom(256, 1);
        assert!(simulate_paged_degradation(&g, 2, 16, 0).is_err());
    }
}
