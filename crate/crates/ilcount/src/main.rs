use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use ilcount::bench;
use ilcount::config::{self, ConfigFlags};
use ilcount::exit;
use ilcount::gen::{self, GenParams, Span, Sweep};
use ilcount::run::{stats_pairs, status_word, timed_count, Limits};
use ilcount_core::{oracle_count, BigInt, CountErrorKind, CountStats, DEFAULT_BUDGET};

#[derive(Parser)]
#[command(
    name = "ilcount",
    version,
    about = "Exact counting of integer solutions of linear constraint systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count the solutions of one instance file.
    Count(CountArgs),
    /// Write random instances.
    Generate(GenerateArgs),
    /// Count every instance of a directory under one or more configurations.
    Bench(BenchArgs),
}

#[derive(clap::Args)]
struct LimitArgs {
    /// Wall-clock limit in seconds.
    #[arg(long, value_name = "SECONDS")]
    time_limit: Option<f64>,
    /// Memory limit in megabytes (cache plus live search state).
    #[arg(long, value_name = "MB")]
    mem_limit: Option<u64>,
}

impl LimitArgs {
    fn limits(&self) -> Result<Limits> {
        let time = match self.time_limit {
            Some(t) if !(t >= 0.0 && t.is_finite()) => {
                bail!("--time-limit must be a nonnegative number")
            }
            t => t.map(Duration::from_secs_f64),
        };
        Ok(Limits {
            time,
            memory_bytes: self.mem_limit.map(|mb| mb.saturating_mul(1 << 20)),
        })
    }
}

#[derive(clap::Args)]
struct CountArgs {
    file: PathBuf,
    #[command(flatten)]
    config: ConfigFlags,
    #[command(flatten)]
    limits: LimitArgs,
    /// Also enumerate by brute force (when the box is small enough) and
    /// fail on disagreement.
    #[arg(long)]
    seed_check: bool,
    /// Count by brute-force enumeration only.
    #[arg(long)]
    oracle: bool,
    /// Enumeration budget (box size) for --seed-check and --oracle.
    #[arg(long, value_name = "POINTS", default_value_t = DEFAULT_BUDGET)]
    oracle_budget: u64,
    /// Write statistics as a JSON object to this path.
    #[arg(long, value_name = "PATH")]
    stats_json: Option<PathBuf>,
}

#[derive(clap::Args)]
struct GenerateArgs {
    /// Number of variables: `N` or `LO..HI`.
    #[arg(long, default_value = "5")]
    n: Span,
    /// Number of rows: `M` or `LO..HI` (capped at n).
    #[arg(long, default_value = "1")]
    m: Span,
    /// Maximum nonzeros per row: `L` or `LO..HI` (capped at n).
    #[arg(long, default_value = "1")]
    l: Span,
    /// Instances per (n, m, l) tuple.
    #[arg(long, default_value_t = 1)]
    per_tuple: usize,
    /// Seed of the first instance; later instances count up from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = -8, allow_hyphen_values = true)]
    domain_lo: i64,
    #[arg(long, default_value_t = 7, allow_hyphen_values = true)]
    domain_hi: i64,
    /// Coefficients are drawn from [coef-lo, coef-hi] without zero.
    #[arg(long, default_value_t = -10, allow_hyphen_values = true)]
    coef_lo: i64,
    #[arg(long, default_value_t = 10, allow_hyphen_values = true)]
    coef_hi: i64,
    #[arg(long, default_value_t = -20, allow_hyphen_values = true)]
    rhs_lo: i64,
    #[arg(long, default_value_t = 20, allow_hyphen_values = true)]
    rhs_hi: i64,
    /// Output file for a single instance (default: standard output).
    #[arg(long, conflicts_with = "out_dir")]
    out: Option<PathBuf>,
    /// Output directory; one file per instance.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(clap::Args)]
struct BenchArgs {
    /// Directory of `*.ilc` instance files.
    dir: PathBuf,
    /// A configuration written as `count` flags, e.g. "--no-cache --disable=all".
    /// Repeat to compare configurations.
    #[arg(long = "config", value_name = "FLAGS", allow_hyphen_values = true)]
    configs: Vec<String>,
    /// CSV file to append records to.
    #[arg(long, value_name = "PATH")]
    csv: PathBuf,
    #[command(flatten)]
    limits: LimitArgs,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

/// An error with the exit code it maps to.
struct Failure(i32, anyhow::Error);

fn fail(code: i32) -> impl FnOnce(anyhow::Error) -> Failure {
    move |e| Failure(code, e)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Count(args) => cmd_count(args),
        Command::Generate(args) => cmd_generate(args).map_err(fail(exit::IO)),
        Command::Bench(args) => cmd_bench(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(Failure(code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code as u8)
        }
    }
}

fn print_stats(stats: &CountStats) {
    let mut err = std::io::stderr().lock();
    for (k, v) in stats_pairs(stats) {
        let _ = writeln!(err, "{k}={v}");
    }
}

fn write_stats_json(
    path: &PathBuf,
    status: &str,
    count: Option<&BigInt>,
    stats: &CountStats,
) -> Result<()> {
    let mut obj = serde_json::Map::new();
    obj.insert("status".into(), status.into());
    obj.insert("count".into(), count.map(|c| c.to_string()).into());
    for (k, v) in stats_pairs(stats) {
        let value = v
            .parse::<u64>()
            .map(serde_json::Value::from)
            .or_else(|_| v.parse::<f64>().map(serde_json::Value::from))
            .unwrap_or_else(|_| v.into());
        obj.insert(k, value);
    }
    let text = serde_json::to_string_pretty(&serde_json::Value::Object(obj))?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn cmd_count(args: CountArgs) -> Result<i32, Failure> {
    let cfg = args
        .config
        .to_config()
        .map_err(|e| Failure(exit::USAGE, e.into()))?;
    let limits = args.limits.limits().map_err(fail(exit::USAGE))?;
    let text = fs::read_to_string(&args.file)
        .with_context(|| format!("reading {}", args.file.display()))
        .map_err(fail(exit::IO))?;
    let s = ilcount::parse(&text)
        .with_context(|| format!("parsing {}", args.file.display()))
        .map_err(fail(exit::PARSE))?;

    if args.oracle {
        let n = oracle_count(&s, args.oracle_budget).map_err(|e| Failure(exit::USAGE, e.into()))?;
        println!("{n}");
        return Ok(exit::OK);
    }

    let outcome = timed_count(&s, &cfg, &limits);
    let status = status_word(&outcome);
    let (count, stats) = match &outcome {
        Ok(r) => (Some(&r.count), &r.stats),
        Err(e) => (None, &*e.stats),
    };
    print_stats(stats);
    if let Some(path) = &args.stats_json {
        write_stats_json(path, status, count, stats).map_err(fail(exit::IO))?;
    }
    let count = match &outcome {
        Ok(r) => r.count.clone(),
        Err(e) => {
            println!("{status}");
            let code = match e.kind {
                CountErrorKind::Interrupted => exit::TIMEOUT,
                CountErrorKind::MemoryLimit { .. } => exit::MEMOUT,
                CountErrorKind::CacheMismatch => exit::MISMATCH,
                CountErrorKind::Lp(_) => exit::INTERNAL,
            };
            return Err(Failure(code, e.clone().into()));
        }
    };

    if args.seed_check {
        match oracle_count(&s, args.oracle_budget) {
            Ok(expected) if expected == count => eprintln!("seed_check=ok"),
            Ok(expected) => {
                println!("{count}");
                return Err(Failure(
                    exit::MISMATCH,
                    anyhow::anyhow!("counter gave {count}, enumeration gave {expected}"),
                ));
            }
            Err(e) => eprintln!("seed_check=skipped ({e})"),
        }
    }
    println!("{count}");
    Ok(exit::OK)
}

fn cmd_generate(args: GenerateArgs) -> Result<i32> {
    let sweep = Sweep {
        n: args.n,
        m: args.m,
        l: args.l,
        per_tuple: args.per_tuple,
        template: GenParams {
            domain: (args.domain_lo, args.domain_hi),
            coef: (args.coef_lo, args.coef_hi),
            rhs: (args.rhs_lo, args.rhs_hi),
            ..GenParams::new(1, 1, 1, args.seed)
        },
    };
    let params = sweep.params();
    if params.is_empty() {
        bail!("the parameter ranges contain no valid (n, m, l) tuple");
    }
    match (&args.out_dir, &args.out) {
        (Some(dir), _) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for p in &params {
                let path = dir.join(gen::file_name(p));
                fs::write(&path, gen::generate_text(p)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            eprintln!("wrote {} instances to {}", params.len(), dir.display());
        }
        (None, out) => {
            let [p] = &params[..] else {
                bail!("{} instances requested; use --out-dir", params.len());
            };
            let text = gen::generate_text(p)?;
            match out {
                Some(path) => {
                    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
                }
                None => print!("{text}"),
            }
        }
    }
    Ok(exit::OK)
}

fn cmd_bench(args: BenchArgs) -> Result<i32, Failure> {
    let specs = if args.configs.is_empty() {
        vec![String::new()]
    } else {
        args.configs.clone()
    };
    let configs = specs
        .iter()
        .map(|s| config::parse_spec(s))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure(exit::USAGE, e.into()))?;
    let limits = args.limits.limits().map_err(fail(exit::USAGE))?;
    let paths = bench::list_instances(&args.dir).map_err(fail(exit::IO))?;
    let instances = bench::load_instances(&paths).map_err(fail(exit::PARSE))?;
    let records = bench::run_all(&instances, &configs, &limits, args.jobs);
    bench::append_csv(&args.csv, &records).map_err(fail(exit::IO))?;
    let summary = bench::summarize(&records);
    print!("{}", summary.render());
    if summary.disagreements.is_empty() {
        Ok(exit::OK)
    } else {
        Ok(exit::MISMATCH)
    }
}
