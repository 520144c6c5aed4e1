//! Pipeline stages shared by the subcommands. Every stage is a pure
//! function of the resolved config; commands differ only in which stages
//! they run and which files they write.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use chrono::NaiveDate;

use emoji_sentiment::aggregate::{
    build_daily_series, daily_series_csv, series_column, DailySentiment, SeriesColumn,
};
use emoji_sentiment::backtest::{
    self, run_strategy, BacktestResult, Benchmark, StrategyConfig, SweepMatrix,
};
use emoji_sentiment::corpus::{
    filter_emoji_tweets, load_prices, load_tweets, sample_daily, PricePoint, Tweet, TweetFormat,
};
use emoji_sentiment::econometrics::{
    align, align_multi, compare_predictors, logit_fit, ols_fit, render_table, rescale_signed,
    PredictorComparison, RegressionReport,
};
use emoji_sentiment::numfmt::g17;
use emoji_sentiment::sentiment::{
    AnchorSpec, HttpEmbeddingProvider, Lexicon, ProviderConfig, ScoredTweet, Scorer,
};
use emoji_sentiment::volindex::{parse_index_csv, EwmaConfig, VarianceInit, VolIndexSeries};

use crate::config::{RunConfig, TweetFormatOpt};

pub fn load_tweet_input(cfg: &RunConfig) -> Result<Vec<Tweet>> {
    let tweets_path = cfg
        .tweets
        .as_ref()
        .ok_or_else(|| anyhow!("no tweets file configured (--tweets or config)"))?;
    let format = match cfg.tweets_format {
        TweetFormatOpt::Csv => TweetFormat::Csv,
        TweetFormatOpt::Jsonl => TweetFormat::Jsonl,
    };
    let loaded = load_tweets(tweets_path, format).context("stage load-tweets")?;
    for e in &loaded.row_errors {
        eprintln!("warning: {}: row {}: {}", tweets_path.display(), e.row, e.message);
    }
    Ok(loaded.records)
}

pub fn load_price_input(cfg: &RunConfig) -> Result<Vec<PricePoint>> {
    let prices_path = cfg
        .prices
        .as_ref()
        .ok_or_else(|| anyhow!("no prices file configured (--prices or config)"))?;
    let prices = load_prices(prices_path).context("stage load-prices")?;
    for e in &prices.row_errors {
        eprintln!("warning: {}: row {}: {}", prices_path.display(), e.row, e.message);
    }
    Ok(prices.records)
}

pub fn build_scorer(cfg: &RunConfig) -> Result<Scorer> {
    let lexicon = match &cfg.lexicon {
        Some(path) => Lexicon::load(path).context("stage load-lexicon")?,
        None => Lexicon::bundled().clone(),
    };
    let mut scorer = Scorer::lexicon(lexicon);
    if let Some(url) = &cfg.provider_url {
        let anchor = AnchorSpec::new(&cfg.anchor_context, &cfg.anchor_target)
            .context("stage provider-anchor")?;
        let provider = HttpEmbeddingProvider::new(
            url,
            ProviderConfig {
                timeout_secs: cfg.provider_timeout_secs,
                retries: cfg.provider_retries,
            },
        );
        scorer = scorer.with_provider(Box::new(provider), anchor);
    }
    Ok(scorer)
}

/// Filter to emoji tweets, draw the seeded daily sample, score it.
pub fn score_stage(cfg: &RunConfig, tweets: Vec<Tweet>) -> Result<Vec<ScoredTweet>> {
    let emoji_tweets = filter_emoji_tweets(tweets);
    if emoji_tweets.is_empty() {
        bail!("stage score: no emoji-bearing tweets in the corpus");
    }
    let samples = sample_daily(&emoji_tweets, cfg.sample_size, cfg.seed);
    let sampled: Vec<Tweet> = samples.into_iter().flat_map(|s| s.tweets).collect();
    let scorer = build_scorer(cfg)?;
    let scored = scorer.score_tweets(&sampled);
    for w in scorer.warnings() {
        eprintln!("warning: provider: {w}");
    }
    if scored.iter().all(|s| s.mean_score.is_none()) {
        bail!("stage score: no scorable tweets (no emoji matched the lexicon or provider)");
    }
    Ok(scored)
}

/// `tweet_id,date,mean_score,emoji_count` over the scorable tweets.
pub fn score_csv(scored: &[ScoredTweet]) -> String {
    let mut out = String::from("tweet_id,date,mean_score,emoji_count\n");
    for s in scored {
        if let Some(mean) = s.mean_score {
            out.push_str(&format!(
                "{},{},{},{}\n",
                s.tweet.id,
                s.tweet.day(),
                g17(mean),
                s.emoji_count
            ));
        }
    }
    out
}

pub fn aggregate_stage(cfg: &RunConfig, scored: &[ScoredTweet]) -> Vec<DailySentiment> {
    let n_values: BTreeSet<usize> = cfg.n_values.iter().copied().collect();
    build_daily_series(scored, &n_values)
}

pub fn ewma_config(cfg: &RunConfig) -> EwmaConfig {
    EwmaConfig {
        lambda: cfg.lambda,
        horizon_days: cfg.horizon_days,
        scale: cfg.index_scale,
        annualization: cfg.annualization,
        init: VarianceInit::MeanSquaredWindow(7),
    }
}

/// Volatility index from the configured source: a precomputed CSV when
/// given, otherwise the EWMA index over the price series.
pub fn index_stage(cfg: &RunConfig, prices: &[PricePoint]) -> Result<VolIndexSeries> {
    if let Some(path) = &cfg.index {
        let body = std::fs::read_to_string(path)
            .with_context(|| format!("stage index: cannot read {}", path.display()))?;
        let points = parse_index_csv(&body).map_err(|e| anyhow!("stage index: {e}"))?;
        Ok(VolIndexSeries::from_points(points, cfg.horizon_days))
    } else {
        VolIndexSeries::from_prices(prices, &ewma_config(cfg)).context("stage index")
    }
}

pub fn price_series(prices: &[PricePoint]) -> Vec<(NaiveDate, f64)> {
    prices.iter().map(|p| (p.date, p.close)).collect()
}

fn load_dated_csv(path: &Path) -> Result<Vec<(NaiveDate, f64)>> {
    let body = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    parse_index_csv(&body).map_err(|e| anyhow!("{}: {e}", path.display()))
}

/// Logistic fit or the reason it was rejected (single class, complete
/// separation) — a rejected fit is reported, never silently numbered.
#[derive(serde::Serialize)]
#[serde(untagged)]
pub enum LogitOutcome {
    Fit(RegressionReport),
    Rejected { rejected: String },
}

#[derive(serde::Serialize)]
pub struct RegressionBundle {
    /// Next-day price on each sentiment measure (one per n, top then bottom).
    pub price_on_sentiment: BTreeMap<String, RegressionReport>,
    /// Weekly index delta on the daily median.
    pub delta_on_median: RegressionReport,
    /// Weekly index direction (logit) on the daily median.
    pub dir_on_median: LogitOutcome,
    /// Text-vs-emoji comparison when a text-sentiment series is supplied.
    pub comparison: Option<PredictorComparison>,
}

pub fn regress_stage(
    cfg: &RunConfig,
    daily: &[DailySentiment],
    prices: &[(NaiveDate, f64)],
    index: &VolIndexSeries,
) -> Result<RegressionBundle> {
    let include_short = cfg.include_short_days;
    let mut price_on_sentiment = BTreeMap::new();
    for &n in &cfg.n_values {
        for (label, column) in [
            (format!("top{n}avg"), SeriesColumn::AvgTop(n)),
            (format!("bottom{n}avg"), SeriesColumn::AvgBottom(n)),
        ] {
            let series = series_column(daily, column, include_short);
            let sample = align(&series, prices, cfg.lag_days, &label)
                .with_context(|| format!("stage regress: align {label}"))?;
            let report =
                ols_fit(&sample).with_context(|| format!("stage regress: ols {label}"))?;
            price_on_sentiment.insert(label, report);
        }
    }

    let median = series_column(daily, SeriesColumn::Median, include_short);
    let delta_sample = align(&median, &index.delta_series(), 0, "sentiment_median")
        .context("stage regress: align delta")?;
    let delta_on_median = ols_fit(&delta_sample).context("stage regress: ols delta")?;

    let dir_sample = align(&median, &index.dir_series(), 0, "sentiment_median")
        .context("stage regress: align dir")?;
    let dir_on_median = match logit_fit(&dir_sample) {
        Ok(report) => LogitOutcome::Fit(report),
        Err(e) => LogitOutcome::Rejected {
            rejected: e.to_string(),
        },
    };

    let comparison = match &cfg.text_sentiment {
        Some(path) => {
            let text = load_dated_csv(path).context("stage regress: text sentiment")?;
            let top_n = cfg.n_values.first().copied().unwrap_or(5);
            let emoji = series_column(daily, SeriesColumn::AvgTop(top_n), include_short);
            let mut sample = align_multi(
                &[("text_sentiment", &text), ("emoji_sentiment", &emoji)],
                prices,
                cfg.lag_days,
            )
            .context("stage regress: align comparison")?;
            // rescale over the estimation sample only
            for column in sample.predictors.iter_mut() {
                *column = rescale_signed(column).context("stage regress: rescale")?;
            }
            Some(compare_predictors(&sample).context("stage regress: comparison")?)
        }
        None => None,
    };

    Ok(RegressionBundle {
        price_on_sentiment,
        delta_on_median,
        dir_on_median,
        comparison,
    })
}

/// Text rendering of the whole bundle, one table per response variable.
pub fn regression_tables(bundle: &RegressionBundle) -> String {
    let mut out = String::new();
    let mut labels = Vec::new();
    let mut reports = Vec::new();
    // top columns first, then bottom, each sorted by n
    let mut keys: Vec<&String> = bundle.price_on_sentiment.keys().collect();
    keys.sort_by_key(|k| {
        let is_bottom = k.starts_with("bottom");
        let n: usize = k
            .trim_start_matches("top")
            .trim_start_matches("bottom")
            .trim_end_matches("avg")
            .parse()
            .unwrap_or(0);
        (is_bottom, n)
    });
    for (i, key) in keys.iter().enumerate() {
        labels.push(format!("({}) {key}", i + 1));
        reports.push(bundle.price_on_sentiment[*key].clone());
    }
    out.push_str(&render_table("Price_BTC (next day)", &labels, &reports));
    out.push('\n');
    out.push_str(&render_table(
        "delta_volindex_week",
        &["(1) median".to_string()],
        std::slice::from_ref(&bundle.delta_on_median),
    ));
    out.push('\n');
    match &bundle.dir_on_median {
        LogitOutcome::Fit(report) => {
            out.push_str(&render_table(
                "dir_volindex_week (logit)",
                &["(1) median".to_string()],
                std::slice::from_ref(report),
            ));
        }
        LogitOutcome::Rejected { rejected } => {
            out.push_str(&format!(
                "Y: dir_volindex_week (logit)\n  fit rejected: {rejected}\n"
            ));
        }
    }
    if let Some(cmp) = &bundle.comparison {
        out.push('\n');
        let mut reports = cmp.singles.clone();
        reports.push(cmp.joint.clone());
        out.push_str(&render_table(
            "Price_BTC (text vs emoji)",
            &[
                "(1) text".to_string(),
                "(2) emoji".to_string(),
                "(3) joint".to_string(),
            ],
            &reports,
        ));
    }
    out
}

pub fn backtest_stage(
    cfg: &RunConfig,
    daily: &[DailySentiment],
    prices: &[(NaiveDate, f64)],
) -> Result<BacktestResult> {
    let series = series_column(
        daily,
        SeriesColumn::AvgTop(cfg.strategy_n),
        cfg.include_short_days,
    );
    if series.is_empty() {
        bail!(
            "stage backtest: no avgtop_{} series (is {} in n_values?)",
            cfg.strategy_n,
            cfg.strategy_n
        );
    }
    let strategy = StrategyConfig {
        n: cfg.strategy_n,
        benchmark: match cfg.pace {
            Some(pace) => Benchmark::Moving { pace },
            None => Benchmark::Cumulative,
        },
        empty_window_policy: cfg.empty_window.into(),
    };
    let result = run_strategy(&series, prices, &strategy).context("stage backtest")?;
    if !backtest::verify_against_oracle(&result, &series, prices, &strategy) {
        bail!("stage backtest: oracle re-simulation mismatch");
    }
    Ok(result)
}

pub fn sweep_stage(
    cfg: &RunConfig,
    daily: &[DailySentiment],
    prices: &[(NaiveDate, f64)],
) -> Result<SweepMatrix> {
    let (n_lo, n_hi) = cfg.n_range;
    let (p_lo, p_hi) = cfg.pace_range;
    let mut by_n = BTreeMap::new();
    for n in n_lo..=n_hi {
        let series: Vec<(NaiveDate, f64)> = daily
            .iter()
            .filter(|d| cfg.include_short_days || !d.short)
            .filter_map(|d| {
                // sweep ns may exceed the aggregated n_values; recompute
                // from the daily record when available, otherwise error out
                d.avgtop.get(&n).map(|v| (d.date, *v))
            })
            .collect();
        if series.is_empty() {
            bail!(
                "stage sweep: no avgtop_{n} series; add {n} to n_values (have {:?})",
                cfg.n_values
            );
        }
        by_n.insert(n, series);
    }
    backtest::sweep(
        &by_n,
        prices,
        p_lo..=p_hi,
        n_lo..=n_hi,
        cfg.empty_window.into(),
    )
    .context("stage sweep")
}

/// The sweep needs avgtop for every n in its range; make sure aggregation
/// produced them by widening the requested n set.
pub fn n_values_for_sweep(cfg: &RunConfig) -> RunConfig {
    let mut widened = cfg.clone();
    let (lo, hi) = cfg.n_range;
    let mut set: BTreeSet<usize> = cfg.n_values.iter().copied().collect();
    set.extend(lo..=hi);
    widened.n_values = set.into_iter().collect();
    widened
}

pub fn write_out(dir: &Path, name: &str, body: &str) -> Result<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output dir {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, body).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn daily_csv(cfg: &RunConfig, daily: &[DailySentiment]) -> String {
    let n_values: BTreeSet<usize> = cfg.n_values.iter().copied().collect();
    daily_series_csv(daily, &n_values)
}
