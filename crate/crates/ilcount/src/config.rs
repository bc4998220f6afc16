//! Counter configuration flags shared by `count` and `bench`.

use clap::{Args, Parser};
use ilcount_core::{CacheTiming, CounterConfig, SelectionMode, SimplifyConfig, Technique};

#[derive(Debug, Clone, Default, PartialEq, Eq, Args)]
pub struct ConfigFlags {
    /// Disable component caching.
    #[arg(long)]
    pub no_cache: bool,
    /// Disable LP-based row removal everywhere.
    #[arg(long)]
    pub no_lp: bool,
    /// Run LP-based row removal at every search node, not just the root.
    #[arg(long)]
    pub lp_per_node: bool,
    /// Comma-separated techniques to disable, or `all`.
    #[arg(long, value_name = "TECHNIQUES", value_delimiter = ',')]
    pub disable: Vec<String>,
    /// Branching heuristic.
    #[arg(long, value_name = "MODE", default_value = "betweenness", value_parser = parse_selection)]
    pub select: SelectionModeArg,
    /// Probe the cache before simplification instead of after it.
    #[arg(long)]
    pub pre_simplify_cache: bool,
    /// Recompute every k-th cache hit and abort on disagreement.
    #[arg(long, value_name = "K")]
    pub verify_cache: Option<u64>,
}

/// Newtype so clap can carry a default for the selection mode.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SelectionModeArg(pub SelectionMode);

fn parse_selection(s: &str) -> Result<SelectionModeArg, String> {
    SelectionMode::from_name(s)
        .map(SelectionModeArg)
        .ok_or_else(|| {
            let names: Vec<&str> = SelectionMode::ALL.iter().map(|m| m.name()).collect();
            format!(
                "unknown selection mode `{s}` (expected one of {})",
                names.join(", ")
            )
        })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("unknown technique `{0}`")]
    UnknownTechnique(String),
    #[error("{0}")]
    Spec(String),
}

impl ConfigFlags {
    pub fn to_config(&self) -> Result<CounterConfig, ConfigError> {
        let mut simplify = SimplifyConfig::all();
        for name in &self.disable {
            let name = name.trim();
            if name == "all" {
                simplify = SimplifyConfig::none();
            } else if name == "none" || name.is_empty() {
            } else {
                let t = Technique::from_name(name)
                    .ok_or_else(|| ConfigError::UnknownTechnique(name.to_string()))?;
                simplify.set(t, false);
            }
        }
        if self.no_lp {
            simplify.set(Technique::RemoveIndividualRowsLp, false);
        }
        Ok(CounterConfig {
            simplify,
            cache_enabled: !self.no_cache,
            lp_per_node: self.lp_per_node && !self.no_lp,
            selection: self.select.0,
            cache_timing: if self.pre_simplify_cache {
                CacheTiming::PreSimplify
            } else {
                CacheTiming::PostSimplify
            },
            verify_cache_every: self.verify_cache,
            ..CounterConfig::default()
        })
    }
}

#[derive(Parser)]
#[command(no_binary_name = true)]
struct SpecParser {
    #[command(flatten)]
    flags: ConfigFlags,
}

/// Parses a bench configuration written as `count` flags, for example
/// `"--no-cache --disable=all"`. `default` and the empty string give the
/// default configuration.
pub fn parse_spec(spec: &str) -> Result<CounterConfig, ConfigError> {
    let tokens: Vec<&str> = spec
        .split_whitespace()
        .filter(|t| *t != "default")
        .collect();
    let parsed = SpecParser::try_parse_from(tokens)
        .map_err(|e| ConfigError::Spec(format!("config `{spec}`: {}", e.render())))?;
    parsed.flags.to_config()
}
