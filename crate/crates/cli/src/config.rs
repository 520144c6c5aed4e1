//! Run configuration: a TOML file, CLI-flag overrides on top (flags win),
//! and defaults that reproduce the reference settings (50 tweets/day,
//! lambda 0.82, 7-day horizon, lag 1, n in {5, 10}).

use std::path::PathBuf;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use emoji_sentiment::backtest::EmptyWindowPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum TweetFormatOpt {
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum EmptyWindowOpt {
    /// Skip days whose benchmark window is empty (`no_trade` also accepted).
    #[value(alias = "no_trade")]
    NoTrade,
    Trade,
}

impl From<EmptyWindowOpt> for EmptyWindowPolicy {
    fn from(v: EmptyWindowOpt) -> Self {
        match v {
            EmptyWindowOpt::NoTrade => EmptyWindowPolicy::NoTrade,
            EmptyWindowOpt::Trade => EmptyWindowPolicy::Trade,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub tweets: Option<PathBuf>,
    pub tweets_format: TweetFormatOpt,
    pub prices: Option<PathBuf>,
    /// Lexicon JSON; the bundled lexicon when absent.
    pub lexicon: Option<PathBuf>,
    /// Precomputed `date,value` index CSV; computed from prices when absent.
    pub index: Option<PathBuf>,
    /// Optional externally supplied daily text-sentiment CSV (`date,value`).
    pub text_sentiment: Option<PathBuf>,
    pub seed: u64,
    pub sample_size: usize,
    pub n_values: Vec<usize>,
    pub lambda: f64,
    pub horizon_days: u32,
    pub index_scale: f64,
    pub annualization: f64,
    pub lag_days: i64,
    pub anchor_context: String,
    pub anchor_target: String,
    pub empty_window: EmptyWindowOpt,
    pub include_short_days: bool,
    /// Strategy n for the single-run backtest.
    pub strategy_n: usize,
    pub pace: Option<usize>,
    pub pace_range: (usize, usize),
    pub n_range: (usize, usize),
    pub provider_url: Option<String>,
    pub provider_timeout_secs: u64,
    pub provider_retries: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tweets: None,
            tweets_format: TweetFormatOpt::Csv,
            prices: None,
            lexicon: None,
            index: None,
            text_sentiment: None,
            seed: 42,
            sample_size: 50,
            n_values: vec![5, 10],
            lambda: 0.82,
            horizon_days: 7,
            index_scale: 100.0,
            annualization: 365.0,
            lag_days: 1,
            anchor_context: "financially positive and optimistic".to_string(),
            anchor_target: "positive".to_string(),
            empty_window: EmptyWindowOpt::NoTrade,
            include_short_days: true,
            strategy_n: 5,
            pace: None,
            pace_range: (1, 60),
            n_range: (2, 10),
            provider_url: None,
            provider_timeout_secs: 10,
            provider_retries: 2,
        }
    }
}

impl RunConfig {
    pub fn load_toml(path: &std::path::Path) -> anyhow::Result<RunConfig> {
        let body = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        let cfg: RunConfig = toml::from_str(&body)
            .map_err(|e| anyhow::anyhow!("invalid config {}: {e}", path.display()))?;
        Ok(cfg)
    }
}
