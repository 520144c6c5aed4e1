//! # emoji-sentiment
//!
//! Turns emoji-bearing social-media text into daily sentiment series and
//! evaluates their predictive and trading value against crypto price and
//! volatility series.
//!
//! ## Modules
//!
//! - `corpus` - tweet/price ingestion and seeded per-day sampling
//! - `emoji` - table-driven emoji extraction (ZWJ sequences, flags, keycaps)
//! - `sentiment` - cosine-similarity scoring against a bundled lexicon or a
//!   remote embedding provider
//! - `aggregate` - daily top-n / bottom-n / median sentiment series
//! - `volindex` - EWMA realized-volatility index plus weekly delta/direction
//! - `econometrics` - OLS, IRLS logistic regression, rescaling, Fisher-Z
//! - `backtest` - sentiment-gated trading rules, baseline, and the
//!   (pace x n) profit-surface sweep
//! - `check` - independent re-computation oracles used by the `verify`
//!   command
//! - `synth` - seeded synthetic corpora for tests and benchmarks
//!
//! The `parallel` feature (on by default) runs batch scoring and the sweep
//! on a rayon thread pool; with the feature disabled every code path is
//! sequential. Both modes produce bit-identical output.

pub mod aggregate;
pub mod backtest;
pub mod check;
pub mod corpus;
pub mod econometrics;
pub mod emoji;
pub mod numfmt;
pub mod rng;
pub mod sentiment;
pub mod synth;
pub mod volindex;

pub use aggregate::{build_daily_series, DailySentiment};
pub use backtest::{run_strategy, sweep, BacktestResult, StrategyConfig};
pub use corpus::{load_prices, load_tweets, sample_daily, DailySample, PricePoint, Tweet};
pub use econometrics::{align, logit_fit, ols_fit, AlignedSample, RegressionReport};
pub use emoji::{extract_emojis, EmojiTables, EmojiToken};
pub use sentiment::{cosine_similarity, score_tweet, Lexicon, ScoredTweet, Scorer};
pub use volindex::{ewma_variance, log_returns, EwmaConfig, VolIndexSeries};
