//! Exhaustive DPLL counting with component caching.
//!
//! At each node the system is simplified, then either split into the
//! connected components of its primal graph (counts multiply) or branched on
//! one variable over its whole domain (counts add). Counts of non-trivial
//! nodes are memoized under a canonical byte encoding of the node's system.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::time::Duration;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Zero};

use crate::graph::{build_primal_graph, decompose, select_by_betweenness, select_by_degree};
use crate::lp::{BoundedSimplex, LpError, LpSolver};
use crate::simplify::{simplify, SimplifyConfig, SimplifyLog};
use crate::system::{System, SystemStatus, VarId};

const DEFAULT_CACHE_BYTES: u64 = 8 << 30;
const ENTRY_OVERHEAD: u64 = 64;

static DEFAULT_LP: BoundedSimplex = BoundedSimplex {
    max_iterations: 100_000,
};
static NEVER: NeverInterrupt = NeverInterrupt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SelectionMode {
    /// Highest betweenness centrality in the primal graph.
    #[default]
    Betweenness,
    /// Highest primal-graph degree.
    Degree,
    /// Smallest variable id.
    First,
}

impl SelectionMode {
    pub const ALL: [SelectionMode; 3] = [
        SelectionMode::Betweenness,
        SelectionMode::Degree,
        SelectionMode::First,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SelectionMode::Betweenness => "betweenness",
            SelectionMode::Degree => "degree",
            SelectionMode::First => "first",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }
}

/// Whether nodes are keyed on the system as it enters the node or as it
/// leaves simplification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CacheTiming {
    #[default]
    PostSimplify,
    PreSimplify,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CounterConfig {
    /// Techniques for the root node. Inner nodes use the same set minus the
    /// LP technique unless `lp_per_node` is set.
    pub simplify: SimplifyConfig,
    pub cache_enabled: bool,
    pub cache_capacity_bytes: u64,
    pub lp_per_node: bool,
    pub selection: SelectionMode,
    pub cache_timing: CacheTiming,
    /// Hard limit on cache plus live search-path bytes.
    pub memory_limit_bytes: Option<u64>,
    /// Recompute every k-th cache hit from scratch and compare.
    pub verify_cache_every: Option<u64>,
}

impl Default for CounterConfig {
    fn default() -> Self {
        CounterConfig {
            simplify: SimplifyConfig::all(),
            cache_enabled: true,
            cache_capacity_bytes: DEFAULT_CACHE_BYTES,
            lp_per_node: false,
            selection: SelectionMode::Betweenness,
            cache_timing: CacheTiming::PostSimplify,
            memory_limit_bytes: None,
            verify_cache_every: None,
        }
    }
}

impl CounterConfig {
    fn node_simplify(&self) -> SimplifyConfig {
        let mut cfg = self.simplify.clone();
        cfg.remove_individual_rows_lp &= self.lp_per_node;
        cfg
    }
}

/// Cooperative cancellation, polled at every search node.
pub trait Interrupt {
    fn should_stop(&self) -> bool;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NeverInterrupt;

impl Interrupt for NeverInterrupt {
    fn should_stop(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CountStats {
    pub nodes: u64,
    pub cache_hits: u64,
    pub cache_entries: u64,
    pub cache_evictions: u64,
    pub cache_bytes: u64,
    pub decompositions: u64,
    pub branchings: u64,
    pub verified_hits: u64,
    pub max_depth: u32,
    pub simplify: SimplifyLog,
    /// Filled in by callers that have a clock.
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountResult {
    pub count: BigInt,
    pub stats: CountStats,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CountErrorKind {
    #[error("interrupted")]
    Interrupted,
    #[error("memory limit of {limit} bytes exceeded")]
    MemoryLimit { limit: u64 },
    #[error("LP failure: {0}")]
    Lp(#[from] LpError),
    #[error("cache hit disagreed with recomputation")]
    CacheMismatch,
}

/// A failed count, with the statistics gathered up to the failure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{kind}")]
pub struct CountError {
    pub kind: CountErrorKind,
    pub stats: Box<CountStats>,
}

/// Canonical encoding of a system: domains by variable id, then rows sorted
/// by (support, coefficients, rhs). Every integer is written as a sign byte,
/// a big-endian `u32` length and its big-endian magnitude.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CacheKey(Vec<u8>);

fn put_u32(buf: &mut Vec<u8>, n: usize) {
    buf.extend_from_slice(&(n as u32).to_be_bytes());
}

fn put_int(buf: &mut Vec<u8>, n: &BigInt) {
    let (sign, mag) = n.to_bytes_be();
    buf.push(match sign {
        Sign::Minus => 0,
        Sign::NoSign => 1,
        Sign::Plus => 2,
    });
    let mag: &[u8] = if sign == Sign::NoSign { &[] } else { &mag };
    put_u32(buf, mag.len());
    buf.extend_from_slice(mag);
}

impl CacheKey {
    pub fn of(s: &System) -> CacheKey {
        let mut buf = Vec::new();
        buf.push(s.is_inconsistent() as u8);
        put_u32(&mut buf, s.num_vars());
        for (v, d) in s.domains() {
            buf.extend_from_slice(&v.0.to_be_bytes());
            put_int(&mut buf, &d.lo);
            put_int(&mut buf, &d.hi);
        }
        let mut rows: Vec<_> = s.rows().map(|(_, r)| r).collect();
        rows.sort_by(|a, b| {
            a.support()
                .cmp(b.support())
                .then_with(|| {
                    a.terms()
                        .iter()
                        .map(|t| &t.1)
                        .cmp(b.terms().iter().map(|t| &t.1))
                })
                .then_with(|| a.rhs().cmp(b.rhs()))
        });
        put_u32(&mut buf, rows.len());
        for row in rows {
            put_u32(&mut buf, row.len());
            for (v, c) in row.terms() {
                buf.extend_from_slice(&v.0.to_be_bytes());
                put_int(&mut buf, c);
            }
            put_int(&mut buf, row.rhs());
        }
        CacheKey(buf)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

#[derive(Debug, Clone)]
struct Entry {
    count: BigInt,
    last_used: u64,
}

/// Bounded memo table with coarse LRU eviction: once over budget, every
/// entry not used since the median use time is dropped.
#[derive(Debug, Clone)]
pub struct Cache {
    map: BTreeMap<CacheKey, Entry>,
    bytes: u64,
    capacity: u64,
    tick: u64,
    evictions: u64,
}

impl Cache {
    pub fn new(capacity_bytes: u64) -> Self {
        Cache {
            map: BTreeMap::new(),
            bytes: 0,
            capacity: capacity_bytes.max(1),
            tick: 0,
            evictions: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn bytes(&self) -> u64 {
        self.bytes
    }

    pub fn evictions(&self) -> u64 {
        self.evictions
    }

    pub fn probe(&mut self, key: &CacheKey) -> Option<BigInt> {
        self.tick += 1;
        let entry = self.map.get_mut(key)?;
        entry.last_used = self.tick;
        Some(entry.count.clone())
    }

    pub fn store(&mut self, key: CacheKey, count: BigInt) {
        self.tick += 1;
        let size = entry_bytes(&key, &count);
        if size > self.capacity {
            return;
        }
        if let Some(old) = self.map.insert(
            key.clone(),
            Entry {
                count,
                last_used: self.tick,
            },
        ) {
            self.bytes -= entry_bytes(&key, &old.count);
        }
        self.bytes += size;
        if self.bytes > self.capacity {
            self.evict();
        }
    }

    pub fn probe_system(&mut self, s: &System) -> Option<BigInt> {
        self.probe(&CacheKey::of(s))
    }

    pub fn store_system(&mut self, s: &System, count: BigInt) {
        self.store(CacheKey::of(s), count)
    }

    fn evict(&mut self) {
        let mut ticks: Vec<u64> = self.map.values().map(|e| e.last_used).collect();
        ticks.sort_unstable();
        let cutoff = ticks[ticks.len() / 2];
        let before = self.map.len();
        let mut freed = 0;
        self.map.retain(|k, e| {
            let keep = e.last_used > cutoff;
            if !keep {
                freed += entry_bytes(k, &e.count);
            }
            keep
        });
        self.bytes -= freed;
        self.evictions += (before - self.map.len()) as u64;
    }
}

fn entry_bytes(key: &CacheKey, count: &BigInt) -> u64 {
    key.0.len() as u64 + count.bits() / 8 + ENTRY_OVERHEAD
}

/// Counts with the default LP solver and no interruption.
pub fn count(s: &System, cfg: &CounterConfig) -> Result<CountResult, CountError> {
    Counter::new(cfg.clone()).count(s)
}

pub struct Counter<'a> {
    cfg: CounterConfig,
    node_cfg: SimplifyConfig,
    lp: &'a dyn LpSolver,
    interrupt: &'a dyn Interrupt,
    cache: Cache,
    stats: CountStats,
    path_bytes: u64,
}

impl Counter<'static> {
    pub fn new(cfg: CounterConfig) -> Self {
        Counter {
            node_cfg: cfg.node_simplify(),
            cache: Cache::new(cfg.cache_capacity_bytes),
            cfg,
            lp: &DEFAULT_LP,
            interrupt: &NEVER,
            stats: CountStats::default(),
            path_bytes: 0,
        }
    }
}

impl<'a> Counter<'a> {
    pub fn with_lp<'b>(self, lp: &'b dyn LpSolver) -> Counter<'b>
    where
        'a: 'b,
    {
        Counter { lp, ..self }
    }

    pub fn with_interrupt<'b>(self, interrupt: &'b dyn Interrupt) -> Counter<'b>
    where
        'a: 'b,
    {
        Counter { interrupt, ..self }
    }

    pub fn config(&self) -> &CounterConfig {
        &self.cfg
    }

    /// Runs one complete search. The cache starts empty on every call.
    pub fn count(&mut self, s: &System) -> Result<CountResult, CountError> {
        self.cache = Cache::new(self.cfg.cache_capacity_bytes);
        self.stats = CountStats::default();
        self.path_bytes = 0;
        let outcome = self.node(s, 0, true);
        self.stats.cache_entries = self.cache.len() as u64;
        self.stats.cache_evictions = self.cache.evictions();
        self.stats.cache_bytes = self.cache.bytes();
        let stats = core::mem::take(&mut self.stats);
        match outcome {
            Ok(count) => Ok(CountResult { count, stats }),
            Err(kind) => Err(CountError {
                kind,
                stats: Box::new(stats),
            }),
        }
    }

    fn node(&mut self, s: &System, depth: u32, root: bool) -> Result<BigInt, CountErrorKind> {
        if self.interrupt.should_stop() {
            return Err(CountErrorKind::Interrupted);
        }
        self.stats.nodes += 1;
        self.stats.max_depth = self.stats.max_depth.max(depth);

        let caching = self.cfg.cache_enabled;
        let mut key = None;
        if caching && self.cfg.cache_timing == CacheTiming::PreSimplify {
            let k = CacheKey::of(s);
            if let Some(n) = self.cache.probe(&k) {
                return self.on_hit(s, n);
            }
            key = Some(k);
        }

        let cfg = if root {
            &self.cfg.simplify
        } else {
            &self.node_cfg
        };
        let mut log = SimplifyLog::default();
        let simplified = simplify(s, cfg, self.lp, &mut log)?;
        self.stats.simplify.absorb(&log);
        let t = settle_empty_rows(simplified);
        match t.status() {
            SystemStatus::Inconsistent => return Ok(BigInt::zero()),
            SystemStatus::Valid => return Ok(t.box_size()),
            SystemStatus::Open => {}
        }

        if caching && self.cfg.cache_timing == CacheTiming::PostSimplify {
            let k = CacheKey::of(&t);
            if let Some(n) = self.cache.probe(&k) {
                return self.on_hit(&t, n);
            }
            key = Some(k);
        }

        let frame = t.approx_bytes() as u64;
        self.path_bytes += frame;
        if let Some(limit) = self.cfg.memory_limit_bytes {
            if self.path_bytes + self.cache.bytes() > limit {
                return Err(CountErrorKind::MemoryLimit { limit });
            }
        }
        let result = self.expand(&t, depth);
        self.path_bytes -= frame;
        let n = result?;

        if let Some(k) = key {
            self.cache.store(k, n.clone());
        }
        Ok(n)
    }

    fn expand(&mut self, t: &System, depth: u32) -> Result<BigInt, CountErrorKind> {
        let partition = decompose(t);
        if partition.is_decomposable() {
            self.stats.decompositions += 1;
            let mut n = BigInt::one();
            for comp in &partition.components {
                let factor = if comp.rows.is_empty() {
                    t.restrict(&comp.vars, &[]).box_size()
                } else {
                    self.node(&t.restrict(&comp.vars, &comp.rows), depth + 1, false)?
                };
                n *= factor;
                if n.is_zero() {
                    break;
                }
            }
            return Ok(n);
        }

        self.stats.branchings += 1;
        let var = self.pick(t);
        let dom = t.domain(var).expect("live variable").clone();
        let mut n = BigInt::zero();
        let mut v = dom.lo.clone();
        while v <= dom.hi {
            n += self.node(&t.assign(var, &v), depth + 1, false)?;
            v += 1;
        }
        Ok(n)
    }

    fn pick(&self, t: &System) -> VarId {
        match self.cfg.selection {
            SelectionMode::Betweenness => select_by_betweenness(&build_primal_graph(t)),
            SelectionMode::Degree => select_by_degree(&build_primal_graph(t)),
            SelectionMode::First => t.vars().next().expect("open system has variables"),
        }
    }

    fn on_hit(&mut self, s: &System, n: BigInt) -> Result<BigInt, CountErrorKind> {
        self.stats.cache_hits += 1;
        if let Some(every) = self.cfg.verify_cache_every {
            if every > 0 && self.stats.cache_hits.is_multiple_of(every) {
                self.stats.verified_hits += 1;
                let mut cfg = self.cfg.clone();
                cfg.cache_enabled = false;
                cfg.verify_cache_every = None;
                cfg.simplify = self.node_cfg.clone();
                let mut check = Counter::new(cfg)
                    .with_lp(self.lp)
                    .with_interrupt(self.interrupt);
                let fresh = check.count(s).map_err(|e| e.kind)?;
                if fresh.count != n {
                    return Err(CountErrorKind::CacheMismatch);
                }
            }
        }
        Ok(n)
    }
}

/// Resolves rows with no variables left: `0 <= b` is dropped, `0 <= b` with
/// `b < 0` makes the system inconsistent.
fn settle_empty_rows(mut t: System) -> System {
    if t.status() != SystemStatus::Open {
        return t;
    }
    if t.rows()
        .any(|(_, r)| r.is_empty() && *r.rhs() < BigInt::zero())
    {
        t.mark_inconsistent();
        return t;
    }
    t.remove_rows(|_, r| r.is_empty());
    t
}
