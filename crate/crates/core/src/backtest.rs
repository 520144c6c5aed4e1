//! Sentiment-gated daily trading rules, the always-long baseline, and the
//! (pace x n) profit-surface sweep.
//!
//! The strategy walks the dates common to the sentiment and price series.
//! On each day but the last it compares the day's sentiment against a
//! benchmark mean of earlier sentiments — the full prefix, or a trailing
//! `pace`-day window — and, when the day's value reaches the benchmark
//! (inclusive), buys one unit and sells it the next common day. Window
//! means are recomputed from scratch left to right so the independent
//! oracle reproduces every decision bit for bit.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numfmt::g17;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Error)]
pub enum BacktestError {
    #[error("need at least 2 common dates, got {0}")]
    TooFewCommonDates(usize),
    #[error("no sentiment series supplied for n = {0}")]
    MissingSentimentSeries(usize),
}

/// Benchmark the day's sentiment is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Benchmark {
    /// Mean of every prior day's sentiment.
    Cumulative,
    /// Mean of the trailing `pace` days (exclusive of today).
    Moving { pace: usize },
}

/// What to do on days whose benchmark window is empty (the first day).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmptyWindowPolicy {
    NoTrade,
    Trade,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StrategyConfig {
    /// Which top-n sentiment series drives the rule (bookkeeping only;
    /// the caller supplies the matching series).
    pub n: usize,
    pub benchmark: Benchmark,
    pub empty_window_policy: EmptyWindowPolicy,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        StrategyConfig {
            n: 5,
            benchmark: Benchmark::Cumulative,
            empty_window_policy: EmptyWindowPolicy::NoTrade,
        }
    }
}

/// One executed round trip: buy at the day's close, sell at the next
/// common day's close.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Trade {
    pub buy_date: NaiveDate,
    pub buy_price: f64,
    pub sell_price: f64,
}

impl Trade {
    pub fn pnl(&self) -> f64 {
        self.sell_price - self.buy_price
    }
}

#[derive(Debug, Clone)]
pub struct BacktestResult {
    /// Profit per eligible day (zero on skipped days).
    pub daily_pnl: Vec<(NaiveDate, f64)>,
    /// Running sum of `daily_pnl`.
    pub cumulative: Vec<(NaiveDate, f64)>,
    pub trades: Vec<Trade>,
    /// Always-long profit over the same joined series.
    pub baseline_cumulative: f64,
    /// Running always-long profit path (the market-trend line).
    pub baseline_path: Vec<(NaiveDate, f64)>,
}

impl BacktestResult {
    pub fn strategy_profit(&self) -> f64 {
        self.cumulative.last().map(|(_, v)| *v).unwrap_or(0.0)
    }
}

/// Inner join of two dated series, ordered by date.
pub fn join_on_dates(
    sentiment: &[(NaiveDate, f64)],
    prices: &[(NaiveDate, f64)],
) -> Vec<(NaiveDate, f64, f64)> {
    let price_by_date: BTreeMap<NaiveDate, f64> = prices.iter().copied().collect();
    let mut joined: BTreeMap<NaiveDate, (f64, f64)> = BTreeMap::new();
    for (d, s) in sentiment {
        if let Some(&p) = price_by_date.get(d) {
            joined.insert(*d, (*s, p));
        }
    }
    joined.into_iter().map(|(d, (s, p))| (d, s, p)).collect()
}

/// Mean of `values[lo..hi]`, summed left to right; None when empty.
fn window_mean(values: &[f64], lo: usize, hi: usize) -> Option<f64> {
    if lo >= hi {
        return None;
    }
    let mut sum = 0.0;
    for v in &values[lo..hi] {
        sum += v;
    }
    Some(sum / (hi - lo) as f64)
}

/// Run the sentiment-gated rule over the dates common to both series.
pub fn run_strategy(
    sentiment: &[(NaiveDate, f64)],
    prices: &[(NaiveDate, f64)],
    cfg: &StrategyConfig,
) -> Result<BacktestResult, BacktestError> {
    let joined = join_on_dates(sentiment, prices);
    if joined.len() < 2 {
        return Err(BacktestError::TooFewCommonDates(joined.len()));
    }
    let s: Vec<f64> = joined.iter().map(|(_, s, _)| *s).collect();
    let p: Vec<f64> = joined.iter().map(|(_, _, p)| *p).collect();

    let mut daily_pnl = Vec::with_capacity(joined.len() - 1);
    let mut cumulative = Vec::with_capacity(joined.len() - 1);
    let mut baseline_path = Vec::with_capacity(joined.len() - 1);
    let mut trades = Vec::new();
    let mut running = 0.0;
    let mut baseline = 0.0;
    for i in 0..joined.len() - 1 {
        let lo = match cfg.benchmark {
            Benchmark::Cumulative => 0,
            Benchmark::Moving { pace } => i.saturating_sub(pace),
        };
        let trade = match window_mean(&s, lo, i) {
            Some(bench) => s[i] >= bench,
            None => cfg.empty_window_policy == EmptyWindowPolicy::Trade,
        };
        let date = joined[i].0;
        let pnl = if trade {
            trades.push(Trade {
                buy_date: date,
                buy_price: p[i],
                sell_price: p[i + 1],
            });
            p[i + 1] - p[i]
        } else {
            0.0
        };
        running += pnl;
        baseline += p[i + 1] - p[i];
        daily_pnl.push((date, pnl));
        cumulative.push((date, running));
        baseline_path.push((date, baseline));
    }

    Ok(BacktestResult {
        daily_pnl,
        cumulative,
        trades,
        baseline_cumulative: baseline,
        baseline_path,
    })
}

/// Always-long profit: buy one unit every day and sell it the next day,
/// summed over the series (telescopes to last minus first).
pub fn baseline_profit(prices: &[(NaiveDate, f64)]) -> f64 {
    let mut total = 0.0;
    for w in prices.windows(2) {
        total += w[1].1 - w[0].1;
    }
    total
}

/// Profit matrix over the (pace, n) grid with the moving benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepMatrix {
    pub paces: Vec<usize>,
    pub ns: Vec<usize>,
    /// `profit[i][j]` for `paces[i]`, `ns[j]`.
    pub profit: Vec<Vec<f64>>,
}

impl SweepMatrix {
    /// CSV with one row per pace: `pace,n_<n>,...`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("pace");
        for n in &self.ns {
            out.push_str(&format!(",n_{n}"));
        }
        out.push('\n');
        for (pace, row) in self.paces.iter().zip(&self.profit) {
            out.push_str(&pace.to_string());
            for v in row {
                out.push_str(&format!(",{}", g17(*v)));
            }
            out.push('\n');
        }
        out
    }
}

fn sweep_cell(
    sentiment_by_n: &BTreeMap<usize, Vec<(NaiveDate, f64)>>,
    prices: &[(NaiveDate, f64)],
    policy: EmptyWindowPolicy,
    pace: usize,
    n: usize,
) -> Result<f64, BacktestError> {
    let series = sentiment_by_n
        .get(&n)
        .ok_or(BacktestError::MissingSentimentSeries(n))?;
    let cfg = StrategyConfig {
        n,
        benchmark: Benchmark::Moving { pace },
        empty_window_policy: policy,
    };
    Ok(run_strategy(series, prices, &cfg)?.strategy_profit())
}

/// Evaluate the full grid. With the `parallel` feature the cells run on
/// the rayon pool; output is bit-identical to [`sweep_serial`] either way.
pub fn sweep(
    sentiment_by_n: &BTreeMap<usize, Vec<(NaiveDate, f64)>>,
    prices: &[(NaiveDate, f64)],
    pace_range: impl IntoIterator<Item = usize>,
    n_range: impl IntoIterator<Item = usize>,
    policy: EmptyWindowPolicy,
) -> Result<SweepMatrix, BacktestError> {
    let paces: Vec<usize> = pace_range.into_iter().collect();
    let ns: Vec<usize> = n_range.into_iter().collect();
    let cells: Vec<(usize, usize)> = paces
        .iter()
        .flat_map(|&p| ns.iter().map(move |&n| (p, n)))
        .collect();

    #[cfg(feature = "parallel")]
    let flat: Result<Vec<f64>, BacktestError> = cells
        .par_iter()
        .map(|&(p, n)| sweep_cell(sentiment_by_n, prices, policy, p, n))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let flat: Result<Vec<f64>, BacktestError> = cells
        .iter()
        .map(|&(p, n)| sweep_cell(sentiment_by_n, prices, policy, p, n))
        .collect();

    let flat = flat?;
    let profit = flat.chunks(ns.len().max(1)).map(|c| c.to_vec()).collect();
    Ok(SweepMatrix { paces, ns, profit })
}

/// Sequential reference for [`sweep`]; also what the criterion benchmarks
/// compare against.
pub fn sweep_serial(
    sentiment_by_n: &BTreeMap<usize, Vec<(NaiveDate, f64)>>,
    prices: &[(NaiveDate, f64)],
    pace_range: impl IntoIterator<Item = usize>,
    n_range: impl IntoIterator<Item = usize>,
    policy: EmptyWindowPolicy,
) -> Result<SweepMatrix, BacktestError> {
    let paces: Vec<usize> = pace_range.into_iter().collect();
    let ns: Vec<usize> = n_range.into_iter().collect();
    let mut profit = Vec::with_capacity(paces.len());
    for &p in &paces {
        let mut row = Vec::with_capacity(ns.len());
        for &n in &ns {
            row.push(sweep_cell(sentiment_by_n, prices, policy, p, n)?);
        }
        profit.push(row);
    }
    Ok(SweepMatrix { paces, ns, profit })
}

/// True iff an independent naive re-simulation reproduces `result`'s
/// daily pnl exactly.
pub fn verify_against_oracle(
    result: &BacktestResult,
    sentiment: &[(NaiveDate, f64)],
    prices: &[(NaiveDate, f64)],
    cfg: &StrategyConfig,
) -> bool {
    match crate::check::naive_resimulation(sentiment, prices, cfg) {
        Ok(expected) => {
            expected.len() == result.daily_pnl.len()
                && expected
                    .iter()
                    .zip(&result.daily_pnl)
                    .all(|(a, b)| a.0 == b.0 && a.1 == b.1)
        }
        Err(_) => false,
    }
}

/// Trade log CSV: `date,buy_price,sell_price,pnl`.
pub fn trade_log_csv(result: &BacktestResult) -> String {
    let mut out = String::from("date,buy_price,sell_price,pnl\n");
    for t in &result.trades {
        out.push_str(&format!(
            "{},{},{},{}\n",
            t.buy_date,
            g17(t.buy_price),
            g17(t.sell_price),
            g17(t.pnl())
        ));
    }
    out
}

/// Cumulative path CSV: `date,strategy_cum,baseline_cum`.
pub fn cumulative_csv(result: &BacktestResult) -> String {
    let mut out = String::from("date,strategy_cum,baseline_cum\n");
    for ((date, strat), (_, base)) in result.cumulative.iter().zip(&result.baseline_path) {
        out.push_str(&format!("{date},{},{}\n", g17(*strat), g17(*base)));
    }
    out
}
