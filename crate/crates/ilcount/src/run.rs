//! Clocked counting: deadlines, memory limits, and statistics reporting.

use std::time::{Duration, Instant};

use ilcount_core::{
    CountError, CountErrorKind, CountResult, CountStats, Counter, CounterConfig, Interrupt,
    Technique,
};

/// Stops the search once a wall-clock deadline has passed.
#[derive(Debug, Clone, Copy)]
pub struct Deadline(Option<Instant>);

impl Deadline {
    pub fn after(limit: Option<Duration>) -> Self {
        Deadline(limit.map(|d| Instant::now() + d))
    }

    pub fn expired(&self) -> bool {
        self.0.is_some_and(|t| Instant::now() >= t)
    }
}

impl Interrupt for Deadline {
    fn should_stop(&self) -> bool {
        self.expired()
    }
}

/// Resource limits for one count.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Limits {
    pub time: Option<Duration>,
    pub memory_bytes: Option<u64>,
}

impl Limits {
    /// Applies the memory limit to `cfg`: the cache gets half the budget so
    /// it evicts long before the hard limit is reached.
    pub fn apply(&self, cfg: &CounterConfig) -> CounterConfig {
        let mut cfg = cfg.clone();
        if let Some(limit) = self.memory_bytes {
            cfg.memory_limit_bytes = Some(limit);
            cfg.cache_capacity_bytes = cfg.cache_capacity_bytes.min(limit / 2);
        }
        cfg
    }
}

/// Counts `s` under `limits`, filling in `wall_time` on success and failure.
pub fn timed_count(
    s: &ilcount_core::System,
    cfg: &CounterConfig,
    limits: &Limits,
) -> Result<CountResult, CountError> {
    let start = Instant::now();
    let deadline = Deadline::after(limits.time);
    let cfg = limits.apply(cfg);
    let mut counter = Counter::new(cfg).with_interrupt(&deadline);
    match counter.count(s) {
        Ok(mut r) => {
            r.stats.wall_time = start.elapsed();
            Ok(r)
        }
        Err(mut e) => {
            e.stats.wall_time = start.elapsed();
            Err(e)
        }
    }
}

/// Short status word for a counting outcome.
pub fn status_word(r: &Result<CountResult, CountError>) -> &'static str {
    match r {
        Ok(_) => "ok",
        Err(e) => match e.kind {
            CountErrorKind::Interrupted => "timeout",
            CountErrorKind::MemoryLimit { .. } => "memout",
            CountErrorKind::Lp(_) | CountErrorKind::CacheMismatch => "error",
        },
    }
}

/// Statistics as ordered `key=value` pairs.
pub fn stats_pairs(stats: &CountStats) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = vec![
        (
            "time_s".into(),
            format!("{:.3}", stats.wall_time.as_secs_f64()),
        ),
        ("nodes".into(), stats.nodes.to_string()),
        ("cache_hits".into(), stats.cache_hits.to_string()),
        ("cache_entries".into(), stats.cache_entries.to_string()),
        ("cache_evictions".into(), stats.cache_evictions.to_string()),
        ("cache_bytes".into(), stats.cache_bytes.to_string()),
        ("decompositions".into(), stats.decompositions.to_string()),
        ("branchings".into(), stats.branchings.to_string()),
        ("verified_hits".into(), stats.verified_hits.to_string()),
        ("max_depth".into(), stats.max_depth.to_string()),
        (
            "vars_removed".into(),
            stats.simplify.variables_removed.to_string(),
        ),
        (
            "bounds_tightened".into(),
            stats.simplify.bounds_tightened.to_string(),
        ),
        (
            "coefficients_strengthened".into(),
            stats.simplify.coefficients_strengthened.to_string(),
        ),
        (
            "rows_removed_total".into(),
            stats.simplify.rows_removed_total().to_string(),
        ),
    ];
    for t in Technique::ALL {
        out.push((
            format!("rows_removed.{}", t.name()),
            stats.simplify.rows_removed_by(t).to_string(),
        ));
    }
    out
}

/// Compact description of a counter configuration, used as the bench
/// `config` column.
pub fn fingerprint(cfg: &CounterConfig) -> String {
    let mask: String = Technique::ALL
        .iter()
        .map(|t| if cfg.simplify.enabled(*t) { '1' } else { '0' })
        .collect();
    let timing = match cfg.cache_timing {
        ilcount_core::CacheTiming::PostSimplify => "post",
        ilcount_core::CacheTiming::PreSimplify => "pre",
    };
    format!(
        "simp={mask};cache={};lp-node={};select={};timing={timing}",
        if cfg.cache_enabled { "on" } else { "off" },
        if cfg.lp_per_node { "on" } else { "off" },
        cfg.selection.name(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use ilcount_core::fixtures::example_one;
    use ilcount_core::BigInt;

    #[test]
    fn deadline_none_never_fires() {
        assert!(!Deadline::after(None).expired());
        assert!(Deadline::after(Some(Duration::ZERO)).expired());
    }

    #[test]
    fn zero_time_limit_times_out() {
        let r = timed_count(
            &example_one(),
            &CounterConfig::default(),
            &Limits {
                time: Some(Duration::ZERO),
                memory_bytes: None,
            },
        );
        assert_eq!(status_word(&r), "timeout");
    }

    #[test]
    fn unlimited_count() {
        let r = timed_count(
            &example_one(),
            &CounterConfig::default(),
            &Limits::default(),
        )
        .unwrap();
        assert_eq!(r.count, BigInt::from(4));
        assert!(stats_pairs(&r.stats).iter().any(|(k, _)| k == "nodes"));
    }

    #[test]
    fn fingerprint_default() {
        assert_eq!(
            fingerprint(&CounterConfig::default()),
            "simp=1111111;cache=on;lp-node=off;select=betweenness;timing=post"
        );
    }
}
