//! Daily sentiment aggregation: top-n mean, bottom-n mean, and median of
//! the per-tweet emoji-sentiment means.
//!
//! Days with fewer scored tweets than the largest requested `n` still get
//! a record (using every available score) and carry a `short` flag so
//! downstream consumers can keep or drop them.

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use serde::Serialize;
use thiserror::Error;

use crate::numfmt::g17;
use crate::sentiment::ScoredTweet;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Error)]
pub enum AggregateError {
    #[error("empty score list")]
    EmptyScores,
    #[error("n must be positive")]
    ZeroN,
}

/// Mean over a trimmed slice plus whether the day was undersized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrimmedMean {
    pub value: f64,
    pub short: bool,
}

fn sorted_descending(scores: &[f64]) -> Vec<f64> {
    let mut s = scores.to_vec();
    s.sort_by(|a, b| b.partial_cmp(a).expect("finite scores"));
    s
}

/// Mean of the `n` largest scores; if fewer than `n` exist, the mean of
/// all of them, flagged short.
pub fn avg_top(scores: &[f64], n: usize) -> Result<TrimmedMean, AggregateError> {
    if n == 0 {
        return Err(AggregateError::ZeroN);
    }
    if scores.is_empty() {
        return Err(AggregateError::EmptyScores);
    }
    let sorted = sorted_descending(scores);
    let take = n.min(sorted.len());
    Ok(TrimmedMean {
        value: sorted[..take].iter().sum::<f64>() / take as f64,
        short: n > sorted.len(),
    })
}

/// Mirror of [`avg_top`] over the `n` smallest scores.
pub fn avg_bottom(scores: &[f64], n: usize) -> Result<TrimmedMean, AggregateError> {
    if n == 0 {
        return Err(AggregateError::ZeroN);
    }
    if scores.is_empty() {
        return Err(AggregateError::EmptyScores);
    }
    let mut sorted = sorted_descending(scores);
    sorted.reverse();
    let take = n.min(sorted.len());
    Ok(TrimmedMean {
        value: sorted[..take].iter().sum::<f64>() / take as f64,
        short: n > sorted.len(),
    })
}

/// Middle value; even counts average the two middle values.
pub fn daily_median(scores: &[f64]) -> Result<f64, AggregateError> {
    if scores.is_empty() {
        return Err(AggregateError::EmptyScores);
    }
    let sorted = {
        let mut s = scores.to_vec();
        s.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
        s
    };
    let mid = sorted.len() / 2;
    Ok(if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    })
}

/// One day of aggregated sentiment.
#[derive(Debug, Clone, Serialize)]
pub struct DailySentiment {
    pub date: NaiveDate,
    /// Number of scored tweets that day.
    pub count: usize,
    /// True when any requested n exceeds `count`.
    pub short: bool,
    pub avgtop: BTreeMap<usize, f64>,
    pub avgbottom: BTreeMap<usize, f64>,
    pub median: f64,
}

/// Collapse scored tweets into one record per day (UTC). Tweets without a
/// mean score are excluded; days with zero scored tweets are omitted.
/// Output is sorted by date and independent of tweet input order.
pub fn build_daily_series(
    scored: &[ScoredTweet],
    n_values: &BTreeSet<usize>,
) -> Vec<DailySentiment> {
    let mut by_day: BTreeMap<NaiveDate, Vec<f64>> = BTreeMap::new();
    for s in scored {
        if let Some(mean) = s.mean_score {
            by_day.entry(s.tweet.day()).or_default().push(mean);
        }
    }
    let days: Vec<(NaiveDate, Vec<f64>)> = by_day.into_iter().collect();
    let build = |(date, scores): &(NaiveDate, Vec<f64>)| -> DailySentiment {
        let mut avgtop = BTreeMap::new();
        let mut avgbottom = BTreeMap::new();
        let mut short = false;
        for &n in n_values {
            let top = avg_top(scores, n).expect("non-empty day");
            let bottom = avg_bottom(scores, n).expect("non-empty day");
            short = short || top.short;
            avgtop.insert(n, top.value);
            avgbottom.insert(n, bottom.value);
        }
        DailySentiment {
            date: *date,
            count: scores.len(),
            short,
            avgtop,
            avgbottom,
            median: daily_median(scores).expect("non-empty day"),
        }
    };
    #[cfg(feature = "parallel")]
    {
        days.par_iter().map(build).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        days.iter().map(build).collect()
    }
}

/// Render the daily series as CSV:
/// `date,count,short,median,avgtop_<n>...,avgbottom_<n>...`.
pub fn daily_series_csv(series: &[DailySentiment], n_values: &BTreeSet<usize>) -> String {
    let mut out = String::from("date,count,short,median");
    for n in n_values {
        out.push_str(&format!(",avgtop_{n}"));
    }
    for n in n_values {
        out.push_str(&format!(",avgbottom_{n}"));
    }
    out.push('\n');
    for d in series {
        out.push_str(&format!(
            "{},{},{},{}",
            d.date,
            d.count,
            u8::from(d.short),
            g17(d.median)
        ));
        for n in n_values {
            out.push_str(&format!(",{}", g17(d.avgtop[n])));
        }
        for n in n_values {
            out.push_str(&format!(",{}", g17(d.avgbottom[n])));
        }
        out.push('\n');
    }
    out
}

/// Extract one dated sub-series from the daily records.
pub fn series_column(
    series: &[DailySentiment],
    column: SeriesColumn,
    include_short: bool,
) -> Vec<(NaiveDate, f64)> {
    series
        .iter()
        .filter(|d| include_short || !d.short)
        .filter_map(|d| {
            let v = match column {
                SeriesColumn::AvgTop(n) => *d.avgtop.get(&n)?,
                SeriesColumn::AvgBottom(n) => *d.avgbottom.get(&n)?,
                SeriesColumn::Median => d.median,
            };
            Some((d.date, v))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesColumn {
    AvgTop(usize),
    AvgBottom(usize),
    Median,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    use crate::corpus::Tweet;

    fn scored(day: u32, mean: Option<f64>) -> ScoredTweet {
        let ts = format!("2019-03-{day:02}T12:00:00Z");
        ScoredTweet {
            tweet: Tweet {
                id: "t".into(),
                timestamp: ts.parse().unwrap(),
                text: String::new(),
            },
            emoji_scores: Vec::new(),
            mean_score: mean,
            emoji_count: 0,
        }
    }

    #[test]
    fn avg_top_takes_largest() {
        let m = avg_top(&[0.1, 0.5, 0.3, 0.2], 2).unwrap();
        assert_relative_eq!(m.value, 0.4, epsilon = 1e-12);
        assert!(!m.short);
    }

    #[test]
    fn avg_top_short_day_uses_all() {
        let m = avg_top(&[0.4], 5).unwrap();
        assert_eq!(m.value, 0.4);
        assert!(m.short);
    }

    #[test]
    fn avg_top_constant_list() {
        // dyadic constant: the mean is exact
        for n in 1..=3 {
            assert_eq!(avg_top(&[0.25, 0.25, 0.25], n).unwrap().value, 0.25);
        }
        for n in 1..=3 {
            assert_relative_eq!(
                avg_top(&[0.2, 0.2, 0.2], n).unwrap().value,
                0.2,
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn avg_bottom_takes_smallest() {
        let m = avg_bottom(&[0.1, 0.5, 0.3, 0.2], 2).unwrap();
        assert_relative_eq!(m.value, 0.15, epsilon = 1e-12);
    }

    #[test]
    fn avg_bottom_short_day() {
        let m = avg_bottom(&[0.4], 2).unwrap();
        assert_eq!(m.value, 0.4);
        assert!(m.short);
    }

    #[test]
    fn negate_all_duality() {
        let scores = [0.13, -0.2, 0.71, 0.05, -0.44];
        let negated: Vec<f64> = scores.iter().map(|s| -s).collect();
        for n in 1..=5 {
            assert_relative_eq!(
                avg_bottom(&scores, n).unwrap().value,
                -avg_top(&negated, n).unwrap().value,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn median_odd_even_and_table_values() {
        assert_relative_eq!(daily_median(&[0.1, 0.3, 0.2]).unwrap(), 0.2, epsilon = 1e-12);
        assert_relative_eq!(daily_median(&[0.1, 0.3]).unwrap(), 0.2, epsilon = 1e-12);
        // sorted: 0.304 0.369 0.391 0.408 0.434 -> middle 0.391
        assert_eq!(
            daily_median(&[0.434, 0.391, 0.304, 0.408, 0.369]).unwrap(),
            0.391
        );
    }

    #[test]
    fn empty_input_errors() {
        assert!(matches!(avg_top(&[], 2), Err(AggregateError::EmptyScores)));
        assert!(matches!(daily_median(&[]), Err(AggregateError::EmptyScores)));
        assert!(matches!(avg_top(&[0.1], 0), Err(AggregateError::ZeroN)));
    }

    #[test]
    fn one_day_series_hand_computed() {
        let tweets: Vec<ScoredTweet> = [0.1, 0.5, 0.3, 0.2]
            .iter()
            .map(|&m| scored(8, Some(m)))
            .collect();
        let series = build_daily_series(&tweets, &BTreeSet::from([2]));
        assert_eq!(series.len(), 1);
        let d = &series[0];
        assert_relative_eq!(d.avgtop[&2], 0.4, epsilon = 1e-12);
        assert_relative_eq!(d.avgbottom[&2], 0.15, epsilon = 1e-12);
        assert_relative_eq!(d.median, 0.25, epsilon = 1e-12);
        assert_eq!(d.count, 4);
        assert!(!d.short);
    }

    #[test]
    fn unscored_tweets_and_empty_days_are_omitted() {
        let tweets = vec![scored(8, None)];
        assert!(build_daily_series(&tweets, &BTreeSet::from([5])).is_empty());
    }

    #[test]
    fn order_invariance_and_invariants() {
        let ns = BTreeSet::from([2, 3]);
        let mut tweets: Vec<ScoredTweet> = [0.4, 0.1, 0.9, 0.3, 0.6]
            .iter()
            .map(|&m| scored(9, Some(m)))
            .collect();
        let a = build_daily_series(&tweets, &ns);
        tweets.reverse();
        let b = build_daily_series(&tweets, &ns);
        assert_eq!(a[0].avgtop, b[0].avgtop);
        assert_eq!(a[0].median, b[0].median);
        // avgtop monotone non-increasing in n, avgbottom non-decreasing
        assert!(a[0].avgtop[&2] >= a[0].avgtop[&3]);
        assert!(a[0].avgbottom[&2] <= a[0].avgbottom[&3]);
        assert!(a[0].avgtop[&2] >= a[0].median);
        assert!(a[0].avgbottom[&2] <= a[0].median);
    }

    #[test]
    fn csv_layout() {
        let tweets = vec![scored(8, Some(0.4)), scored(8, Some(0.2))];
        let ns = BTreeSet::from([5, 10]);
        let series = build_daily_series(&tweets, &ns);
        let csv = daily_series_csv(&series, &ns);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "date,count,short,median,avgtop_5,avgtop_10,avgbottom_5,avgbottom_10"
        );
        let row = lines.next().unwrap();
        assert!(row.starts_with("2019-03-08,2,1,"), "{row}");
    }
}
