//! Benchmark harness: every instance under every configuration, one CSV
//! record per pair, and a per-configuration summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{bail, Context, Result};
use ilcount_core::{CounterConfig, System};
use serde::{Deserialize, Serialize};

use crate::run::{fingerprint, status_word, timed_count, Limits};

/// Column order of the CSV output.
pub const CSV_COLUMNS: [&str; 9] = [
    "instance",
    "count",
    "status",
    "time_s",
    "nodes",
    "cache_hits",
    "rows_removed_total",
    "vars_removed_total",
    "config",
];

/// One CSV row. `count` is the exact decimal count, or the status word
/// when the run did not finish.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance: String,
    pub count: String,
    pub status: String,
    pub time_s: String,
    pub nodes: u64,
    pub cache_hits: u64,
    pub rows_removed_total: u64,
    pub vars_removed_total: u64,
    pub config: String,
}

impl BenchRecord {
    pub fn solved(&self) -> bool {
        self.status == "ok"
    }

    pub fn seconds(&self) -> f64 {
        self.time_s.parse().unwrap_or(f64::INFINITY)
    }
}

/// Runs one instance under one configuration.
pub fn run_one(instance: &str, s: &System, cfg: &CounterConfig, limits: &Limits) -> BenchRecord {
    let outcome = timed_count(s, cfg, limits);
    let status = status_word(&outcome).to_string();
    let (count, stats) = match outcome {
        Ok(r) => (r.count.to_string(), r.stats),
        Err(e) => (status.clone(), *e.stats),
    };
    BenchRecord {
        instance: instance.to_string(),
        count,
        status,
        time_s: format!("{:.3}", stats.wall_time.as_secs_f64()),
        nodes: stats.nodes,
        cache_hits: stats.cache_hits,
        rows_removed_total: stats.simplify.rows_removed_total(),
        vars_removed_total: stats.simplify.variables_removed,
        config: fingerprint(cfg),
    }
}

/// Instance files (`*.ilc`) directly inside `dir`, sorted by name.
pub fn list_instances(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "ilc") {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

/// Reads and parses every instance; parse failures abort with the file name.
pub fn load_instances(paths: &[PathBuf]) -> Result<Vec<(String, System)>> {
    paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let s =
                crate::format::parse(&text).with_context(|| format!("parsing {}", p.display()))?;
            Ok((p.display().to_string(), s))
        })
        .collect()
}

/// Runs every (instance, config) pair on `jobs` worker threads. Records come
/// back instance-major, config-minor, regardless of scheduling.
pub fn run_all(
    instances: &[(String, System)],
    configs: &[CounterConfig],
    limits: &Limits,
    jobs: usize,
) -> Vec<BenchRecord> {
    let tasks: Vec<(usize, usize)> = (0..instances.len())
        .flat_map(|i| (0..configs.len()).map(move |c| (i, c)))
        .collect();
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<BenchRecord>>> = Mutex::new(vec![None; tasks.len()]);
    std::thread::scope(|scope| {
        for _ in 0..jobs.max(1).min(tasks.len().max(1)) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(i, c)) = tasks.get(k) else { break };
                let (name, s) = &instances[i];
                let record = run_one(name, s, &configs[c], limits);
                results.lock().expect("no worker panicked")[k] = Some(record);
            });
        }
    });
    results
        .into_inner()
        .expect("no worker panicked")
        .into_iter()
        .map(|r| r.expect("every task ran"))
        .collect()
}

/// Appends records to `path`, writing the header only when the file is new
/// or empty.
pub fn append_csv(path: &Path, records: &[BenchRecord]) -> Result<()> {
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(fresh)
        .from_writer(file);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<BenchRecord>> {
    let mut r =
        csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let headers = r.headers()?.clone();
    if headers.iter().ne(CSV_COLUMNS) {
        bail!("{}: unexpected CSV header {:?}", path.display(), headers);
    }
    r.deserialize().map(|rec| Ok(rec?)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigSummary {
    pub config: String,
    pub runs: usize,
    pub solved: usize,
    /// Instances where this configuration was (one of) the quickest solvers.
    pub fastest: usize,
    /// Instances solved by this configuration only.
    pub unique: usize,
    /// Mean wall time over solved instances, in seconds.
    pub mean_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub configs: Vec<ConfigSummary>,
    /// Instances whose finished counts differ between configurations.
    pub disagreements: Vec<String>,
}

pub fn summarize(records: &[BenchRecord]) -> Summary {
    let mut order: Vec<String> = Vec::new();
    let mut by_instance: BTreeMap<&str, Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        if !order.contains(&r.config) {
            order.push(r.config.clone());
        }
        by_instance.entry(&r.instance).or_default().push(r);
    }
    let mut configs: Vec<ConfigSummary> = order
        .iter()
        .map(|c| {
            let mine: Vec<&BenchRecord> = records.iter().filter(|r| &r.config == c).collect();
            let solved: Vec<f64> = mine
                .iter()
                .filter(|r| r.solved())
                .map(|r| r.seconds())
                .collect();
            ConfigSummary {
                config: c.clone(),
                runs: mine.len(),
                solved: solved.len(),
                fastest: 0,
                unique: 0,
                mean_time_s: (!solved.is_empty())
                    .then(|| solved.iter().sum::<f64>() / solved.len() as f64),
            }
        })
        .collect();
    let mut disagreements = Vec::new();
    for (instance, rs) in &by_instance {
        let solved: Vec<&&BenchRecord> = rs.iter().filter(|r| r.solved()).collect();
        if solved.windows(2).any(|w| w[0].count != w[1].count) {
            disagreements.push(instance.to_string());
        }
        if let [only] = solved[..] {
            if order.len() > 1 {
                let k = order.iter().position(|c| c == &only.config).expect("seen");
                configs[k].unique += 1;
            }
        }
        let best = solved
            .iter()
            .map(|r| r.seconds())
            .fold(f64::INFINITY, f64::min);
        for r in &solved {
            if r.seconds() == best {
                let k = order.iter().position(|c| c == &r.config).expect("seen");
                configs[k].fastest += 1;
            }
        }
    }
    Summary {
        configs,
        disagreements,
    }
}

impl Summary {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.configs {
            let mean = c
                .mean_time_s
                .map_or_else(|| "-".to_string(), |t| format!("{t:.3}"));
            writeln!(
                out,
                "config={} runs={} solved={} fastest={} unique={} mean_time_s={}",
                c.config, c.runs, c.solved, c.fastest, c.unique, mean
            )
            .unwrap();
        }
        writeln!(out, "disagreements={}", self.disagreements.len()).unwrap();
        for i in &self.disagreements {
            writeln!(out, "disagreement instance={i}").unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(instance: &str, config: &str, count: &str, status: &str, t: &str) -> BenchRecord {
        BenchRecord {
            instance: instance.into(),
            count: count.into(),
            status: status.into(),
            time_s: t.into(),
            nodes: 1,
            cache_hits: 0,
            rows_removed_total: 0,
            vars_removed_total: 0,
            config: config.into(),
        }
    }

    #[test]
    fn summary_accounting() {
        let records = [
            rec("a", "x", "3", "ok", "0.010"),
            rec("a", "y", "3", "ok", "0.020"),
            rec("b", "x", "timeout", "timeout", "1.000"),
            rec("b", "y", "5", "ok", "0.500"),
            rec("c", "x", "7", "ok", "0.100"),
            rec("c", "y", "8", "ok", "0.100"),
        ];
        let s = summarize(&records);
        let x = &s.configs[0];
        let y = &s.configs[1];
        assert_eq!((x.solved, x.fastest, x.unique), (2, 2, 0));
        assert_eq!((y.solved, y.fastest, y.unique), (3, 2, 1));
        assert!((x.mean_time_s.unwrap() - 0.055).abs() < 1e-12);
        assert_eq!(s.disagreements, ["c"]);
        assert!(s
            .render()
            .contains("config=y runs=3 solved=3 fastest=2 unique=1"));
    }

    #[test]
    fn csv_append_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        let a = rec(
            "a,b",
            "simp=1;cache=on",
            "123456789012345678901234567890",
            "ok",
            "0.001",
        );
        append_csv(&path, std::slice::from_ref(&a)).unwrap();
        append_csv(&path, std::slice::from_ref(&a)).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_COLUMNS.join(","));
        assert_eq!(text.lines().count(), 3);
        assert_eq!(read_csv(&path).unwrap(), [a.clone(), a]);
    }
}
