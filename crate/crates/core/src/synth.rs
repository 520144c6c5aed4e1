//! Seeded synthetic corpora and price paths for tests, benchmarks, and
//! the end-to-end recovery harness.
//!
//! Tweets are composed from the bundled-lexicon emoji pool with a per-day
//! bullishness mix, so the daily top-n sentiment varies; prices can then
//! be planted on that series with a known loading.

use chrono::{Days, NaiveDate, NaiveTime};

use crate::corpus::{PricePoint, Tweet};
use crate::rng::SplitMix64;

const POSITIVE_POOL: &[&str] = &["🚀", "❤️", "🔥"];
const NEUTRAL_POOL: &[&str] = &["💰", "🇨🇦"];
const NEGATIVE_POOL: &[&str] = &["👉", "⚠️", "🤔"];
const PHRASES: &[&str] = &[
    "market update",
    "btc looking strong",
    "watch this level",
    "volume picking up",
    "daily close thread",
    "no comment",
    "chart of the day",
    "alt season soon",
];

#[derive(Debug, Clone, Copy)]
pub struct SynthCorpusConfig {
    pub seed: u64,
    pub days: usize,
    pub tweets_per_day: usize,
    pub start: NaiveDate,
}

impl Default for SynthCorpusConfig {
    fn default() -> Self {
        SynthCorpusConfig {
            seed: 42,
            days: 30,
            tweets_per_day: 60,
            start: NaiveDate::from_ymd_opt(2019, 3, 8).expect("valid date"),
        }
    }
}

fn pick<'a>(rng: &mut SplitMix64, pool: &[&'a str]) -> &'a str {
    pool[rng.next_below(pool.len() as u64) as usize]
}

/// Generate an emoji-bearing corpus. Every tweet carries 1-3 emojis drawn
/// from the positive pool with the day's bullishness probability, so days
/// differ in their top-tweet sentiment.
pub fn synth_tweets(cfg: &SynthCorpusConfig) -> Vec<Tweet> {
    let mut rng = SplitMix64::new(cfg.seed);
    let mut tweets = Vec::with_capacity(cfg.days * cfg.tweets_per_day);
    for day in 0..cfg.days {
        let date = cfg.start + Days::new(day as u64);
        let bullishness = rng.next_f64();
        for slot in 0..cfg.tweets_per_day {
            let mut text = String::from(pick(&mut rng, PHRASES));
            let emoji_count = 1 + rng.next_below(3) as usize;
            for _ in 0..emoji_count {
                let r = rng.next_f64();
                let emoji = if r < bullishness {
                    pick(&mut rng, POSITIVE_POOL)
                } else if r < bullishness + 0.25 {
                    pick(&mut rng, NEUTRAL_POOL)
                } else {
                    pick(&mut rng, NEGATIVE_POOL)
                };
                text.push(' ');
                text.push_str(emoji);
            }
            let second = (slot % 60) as u32;
            let minute = ((slot / 60) % 60) as u32;
            let time = NaiveTime::from_hms_opt(12, minute, second).expect("valid time");
            tweets.push(Tweet {
                id: format!("synth-{day}-{slot}"),
                timestamp: date.and_time(time).and_utc(),
                text,
            });
        }
    }
    tweets
}

/// Plant a price series on a daily sentiment series:
/// `price(d + 1 day) = intercept + loading * sentiment(d) + noise`, plus
/// an initial price on the first sentiment day, so a lag-1 alignment has
/// one row per sentiment day.
pub fn planted_prices(
    sentiment: &[(NaiveDate, f64)],
    intercept: f64,
    loading: f64,
    noise_sd: f64,
    seed: u64,
) -> Vec<PricePoint> {
    let mut rng = SplitMix64::new(seed);
    let mut prices = Vec::with_capacity(sentiment.len() + 1);
    if let Some(&(first, s)) = sentiment.first() {
        prices.push(PricePoint {
            date: first,
            close: (intercept + loading * s).max(1.0),
        });
    }
    for &(date, s) in sentiment {
        let close = intercept + loading * s + noise_sd * rng.next_gaussian();
        prices.push(PricePoint {
            date: date + Days::new(1),
            close: close.max(1.0),
        });
    }
    prices
}

/// Random-walk price path quantized to 0.25 so sums of differences stay
/// exact in f64 (used by exactness fixtures).
pub fn quantized_price_walk(seed: u64, len: usize, start: NaiveDate) -> Vec<PricePoint> {
    let mut rng = SplitMix64::new(seed);
    let mut price = 4000.0;
    (0..len)
        .map(|i| {
            let step = (rng.next_below(801) as f64 - 400.0) * 0.25;
            price = (price + step).max(100.0);
            PricePoint {
                date: start + Days::new(i as u64),
                close: price,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::filter_emoji_tweets;

    #[test]
    fn synth_tweets_all_carry_emoji() {
        let cfg = SynthCorpusConfig {
            days: 3,
            tweets_per_day: 10,
            ..SynthCorpusConfig::default()
        };
        let tweets = synth_tweets(&cfg);
        assert_eq!(tweets.len(), 30);
        assert_eq!(filter_emoji_tweets(tweets.clone()).len(), 30);
        // deterministic
        assert_eq!(synth_tweets(&cfg), tweets);
    }

    #[test]
    fn planted_prices_cover_lag_one() {
        let base = NaiveDate::from_ymd_opt(2019, 3, 8).unwrap();
        let sentiment: Vec<(NaiveDate, f64)> =
            (0..5).map(|i| (base + Days::new(i), 0.4)).collect();
        let prices = planted_prices(&sentiment, 4000.0, 1000.0, 10.0, 1);
        assert_eq!(prices.len(), 6);
        assert_eq!(prices[0].date, base);
        assert_eq!(prices[5].date, base + Days::new(5));
        assert!(prices.iter().all(|p| p.close > 0.0));
    }

    #[test]
    fn quantized_walk_diffs_are_exact() {
        let base = NaiveDate::from_ymd_opt(2019, 3, 8).unwrap();
        let prices = quantized_price_walk(3, 100, base);
        let total: f64 = prices.windows(2).map(|w| w[1].close - w[0].close).sum();
        assert_eq!(total, prices[99].close - prices[0].close);
    }
}
