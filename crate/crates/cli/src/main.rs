//! Command-line front end wiring the pipeline:
//! score -> aggregate -> index -> regress -> backtest -> sweep, plus the
//! oracle `verify` command.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input/config error.

mod config;
mod manifest;
mod stages;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use emoji_sentiment::backtest::{cumulative_csv, trade_log_csv};
use emoji_sentiment::check;
use emoji_sentiment::numfmt::g17;

use config::{EmptyWindowOpt, RunConfig, TweetFormatOpt};
use manifest::Manifest;
use stages::*;

#[derive(Parser)]
#[command(
    name = "emoji-sentiment",
    about = "Emoji sentiment series and their predictive/trading value on crypto markets",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every data-driven subcommand; each one overrides the
/// matching config-file key.
#[derive(Args, Debug, Default)]
struct CommonFlags {
    /// TOML config file; flags win over file values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tweets: Option<PathBuf>,
    /// Tweet file format.
    #[arg(long, value_enum)]
    format: Option<TweetFormatOpt>,
    #[arg(long)]
    prices: Option<PathBuf>,
    /// Lexicon JSON (bundled lexicon when omitted).
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Precomputed volatility-index CSV (date,value).
    #[arg(long)]
    index: Option<PathBuf>,
    /// Daily text-sentiment CSV (date,value) for the comparison fit.
    #[arg(long)]
    text_sentiment: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    sample_size: Option<usize>,
    /// Top/bottom n; repeat for several values (default 5 and 10).
    #[arg(long = "n")]
    n: Vec<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Weekly-delta horizon in days.
    #[arg(long)]
    horizon: Option<u32>,
    /// Regression lag in days.
    #[arg(long)]
    lag: Option<i64>,
    /// Moving-benchmark window for `backtest` (cumulative when omitted).
    #[arg(long)]
    pace: Option<usize>,
    #[arg(long, value_enum)]
    empty_window: Option<EmptyWindowOpt>,
    #[arg(long)]
    provider_url: Option<String>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

impl CommonFlags {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load_toml(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = &self.tweets {
            cfg.tweets = Some(v.clone());
        }
        if let Some(v) = self.format {
            cfg.tweets_format = v;
        }
        if let Some(v) = &self.prices {
            cfg.prices = Some(v.clone());
        }
        if let Some(v) = &self.lexicon {
            cfg.lexicon = Some(v.clone());
        }
        if let Some(v) = &self.index {
            cfg.index = Some(v.clone());
        }
        if let Some(v) = &self.text_sentiment {
            cfg.text_sentiment = Some(v.clone());
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.sample_size {
            cfg.sample_size = v;
        }
        if !self.n.is_empty() {
            cfg.n_values = self.n.clone();
            cfg.strategy_n = self.n[0];
        }
        if let Some(v) = self.lambda {
            cfg.lambda = v;
        }
        if let Some(v) = self.horizon {
            cfg.horizon_days = v;
        }
        if let Some(v) = self.lag {
            cfg.lag_days = v;
        }
        if self.pace.is_some() {
            cfg.pace = self.pace;
        }
        if let Some(v) = self.empty_window {
            cfg.empty_window = v;
        }
        if let Some(v) = &self.provider_url {
            cfg.provider_url = Some(v.clone());
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sample, score, and emit per-tweet sentiment CSV.
    Score(CommonFlags),
    /// Emit the daily sentiment series CSV.
    Aggregate(CommonFlags),
    /// Emit the volatility index CSV (computed or passed through).
    Index(CommonFlags),
    /// Fit and report all regressions (JSON + text tables).
    Regress(CommonFlags),
    /// Run the sentiment-gated strategy; emit trade log and pnl path.
    Backtest(CommonFlags),
    /// Profit surface over the (pace, n) grid.
    Sweep(CommonFlags),
    /// Run every stage into one directory with a reproducibility manifest.
    Pipeline {
        #[command(flatten)]
        flags: CommonFlags,
        /// Re-run from a previously written manifest (inputs must hash
        /// identically).
        #[arg(long)]
        from_manifest: Option<PathBuf>,
    },
    /// Run the module oracle checks; nonzero exit on any mismatch.
    Verify {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn cmd_score(cfg: &RunConfig, out_dir: &std::path::Path) -> Result<()> {
    let tweets = load_tweet_input(cfg)?;
    let scored = score_stage(cfg, tweets)?;
    write_out(out_dir, "scored_tweets.csv", &score_csv(&scored))?;
    println!("wrote {}", out_dir.join("scored_tweets.csv").display());
    Ok(())
}

fn cmd_aggregate(cfg: &RunConfig, out_dir: &std::path::Path) -> Result<()> {
    let tweets = load_tweet_input(cfg)?;
    let scored = score_stage(cfg, tweets)?;
    let daily = aggregate_stage(cfg, &scored);
    write_out(out_dir, "daily_sentiment.csv", &daily_csv(cfg, &daily))?;
    println!("wrote {}", out_dir.join("daily_sentiment.csv").display());
    Ok(())
}

fn cmd_index(cfg: &RunConfig, out_dir: &std::path::Path) -> Result<()> {
    let prices = load_price_input(cfg)?;
    let index = index_stage(cfg, &prices)?;
    write_out(out_dir, "volindex.csv", &index.to_csv())?;
    println!("wrote {}", out_dir.join("volindex.csv").display());
    Ok(())
}

fn cmd_regress(cfg: &RunConfig, out_dir: &std::path::Path) -> Result<()> {
    let tweets = load_tweet_input(cfg)?;
    let price_points = load_price_input(cfg)?;
    let scored = score_stage(cfg, tweets)?;
    let daily = aggregate_stage(cfg, &scored);
    let index = index_stage(cfg, &price_points)?;
    let prices = price_series(&price_points);
    let bundle = regress_stage(cfg, &daily, &prices, &index)?;
    let json = serde_json::to_string_pretty(&bundle).context("serialize regressions")? + "\n";
    write_out(out_dir, "regressions.json", &json)?;
    let tables = regression_tables(&bundle);
    write_out(out_dir, "regressions.txt", &tables)?;
    print!("{tables}");
    Ok(())
}

fn cmd_backtest(cfg: &RunConfig, out_dir: &std::path::Path) -> Result<()> {
    let tweets = load_tweet_input(cfg)?;
    let price_points = load_price_input(cfg)?;
    let scored = score_stage(cfg, tweets)?;
    let daily = aggregate_stage(cfg, &scored);
    let prices = price_series(&price_points);
    let result = backtest_stage(cfg, &daily, &prices)?;
    write_out(out_dir, "trades.csv", &trade_log_csv(&result))?;
    write_out(out_dir, "cumulative.csv", &cumulative_csv(&result))?;
    println!(
        "strategy profit {} over {} trades; always-long baseline {}",
        g17(result.strategy_profit()),
        result.trades.len(),
        g17(result.baseline_cumulative)
    );
    Ok(())
}

fn cmd_sweep(cfg: &RunConfig, out_dir: &std::path::Path) -> Result<()> {
    let cfg = n_values_for_sweep(cfg);
    let tweets = load_tweet_input(&cfg)?;
    let price_points = load_price_input(&cfg)?;
    let scored = score_stage(&cfg, tweets)?;
    let daily = aggregate_stage(&cfg, &scored);
    let prices = price_series(&price_points);
    let matrix = sweep_stage(&cfg, &daily, &prices)?;
    write_out(out_dir, "sweep.csv", &matrix.to_csv())?;
    println!("wrote {}", out_dir.join("sweep.csv").display());
    Ok(())
}

fn cmd_pipeline(cfg: &RunConfig, out_dir: &std::path::Path) -> Result<()> {
    let manifest = Manifest::for_run(cfg)?;

    let sweep_cfg = n_values_for_sweep(cfg);
    let tweets = load_tweet_input(cfg)?;
    let price_points = load_price_input(cfg)?;
    let scored = score_stage(cfg, tweets)?;
    // two aggregations: the report series uses the configured n_values
    // (including its short-day flags), the sweep needs every n in range
    let daily = aggregate_stage(cfg, &scored);
    let daily_sweep = aggregate_stage(&sweep_cfg, &scored);
    let index = index_stage(cfg, &price_points)?;
    let prices = price_series(&price_points);

    write_out(out_dir, "scored_tweets.csv", &score_csv(&scored))?;
    write_out(out_dir, "daily_sentiment.csv", &daily_csv(cfg, &daily))?;
    write_out(out_dir, "volindex.csv", &index.to_csv())?;

    let bundle = regress_stage(cfg, &daily, &prices, &index)?;
    let json = serde_json::to_string_pretty(&bundle).context("serialize regressions")? + "\n";
    write_out(out_dir, "regressions.json", &json)?;
    write_out(out_dir, "regressions.txt", &regression_tables(&bundle))?;

    let result = backtest_stage(cfg, &daily, &prices)?;
    write_out(out_dir, "trades.csv", &trade_log_csv(&result))?;
    write_out(out_dir, "cumulative.csv", &cumulative_csv(&result))?;

    let matrix = sweep_stage(&sweep_cfg, &daily_sweep, &prices)?;
    write_out(out_dir, "sweep.csv", &matrix.to_csv())?;

    write_out(out_dir, "manifest.json", &manifest.to_json())?;
    println!("pipeline complete: {}", out_dir.display());
    Ok(())
}

fn cmd_verify(seed: u64) -> ExitCode {
    let outcomes = check::run_all(seed);
    let mut all_passed = true;
    for o in &outcomes {
        println!(
            "{}: {} ({})",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.detail
        );
        all_passed &= o.passed;
    }
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Score(flags) => cmd_score(&flags.resolve()?, &flags.out_dir)?,
        Command::Aggregate(flags) => cmd_aggregate(&flags.resolve()?, &flags.out_dir)?,
        Command::Index(flags) => cmd_index(&flags.resolve()?, &flags.out_dir)?,
        Command::Regress(flags) => cmd_regress(&flags.resolve()?, &flags.out_dir)?,
        Command::Backtest(flags) => cmd_backtest(&flags.resolve()?, &flags.out_dir)?,
        Command::Sweep(flags) => cmd_sweep(&flags.resolve()?, &flags.out_dir)?,
        Command::Pipeline {
            flags,
            from_manifest,
        } => {
            let cfg = match &from_manifest {
                Some(path) => {
                    let manifest = Manifest::load(path)?;
                    manifest.verify_inputs()?;
                    manifest.config
                }
                None => flags.resolve()?,
            };
            cmd_pipeline(&cfg, &flags.out_dir)?;
        }
        Command::Verify { seed } => return Ok(cmd_verify(seed)),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
