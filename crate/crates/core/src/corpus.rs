//! Tweet and price ingestion plus the seeded per-day sampling that defines
//! the test set.
//!
//! Loaders collect row-level errors instead of aborting: a load fails only
//! when the file is unreadable or zero valid rows remain. Timestamps are
//! normalized to UTC and a tweet's day is its UTC calendar date.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{DateTime, Datelike, NaiveDate, NaiveDateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::emoji::{extract_emojis_with, EmojiTables};
use crate::rng::{sample_indices, SplitMix64};

/// One raw tweet record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tweet {
    pub id: String,
    pub timestamp: DateTime<Utc>,
    pub text: String,
}

impl Tweet {
    /// UTC calendar day the tweet belongs to.
    pub fn day(&self) -> NaiveDate {
        self.timestamp.date_naive()
    }
}

/// One daily closing price observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PricePoint {
    pub date: NaiveDate,
    pub close: f64,
}

/// The tweets drawn for one calendar day.
#[derive(Debug, Clone)]
pub struct DailySample {
    pub date: NaiveDate,
    pub tweets: Vec<Tweet>,
    pub seed: u64,
}

/// A row that failed to parse, with its 1-based position in the file.
#[derive(Debug, Clone)]
pub struct RowError {
    pub row: usize,
    pub message: String,
}

/// Successful load plus any skipped rows.
#[derive(Debug)]
pub struct Loaded<T> {
    pub records: Vec<T>,
    pub row_errors: Vec<RowError>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Unreadable {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: missing required column {column:?}")]
    MissingColumn { path: String, column: String },
    #[error("{path}: no valid rows ({errors} row errors)")]
    NoValidRows { path: String, errors: usize },
    #[error("csv error in {path}: {source}")]
    Csv { path: String, source: csv::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TweetFormat {
    Csv,
    Jsonl,
}

/// Parse an ISO-8601 timestamp; offsets are converted to UTC, zone-less
/// forms are taken as UTC, and a bare date means midnight UTC.
fn parse_timestamp(raw: &str) -> Option<DateTime<Utc>> {
    let raw = raw.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
        return Some(dt.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(raw, fmt) {
            return Some(naive.and_utc());
        }
    }
    if let Ok(date) = NaiveDate::parse_from_str(raw, "%Y-%m-%d") {
        return Some(date.and_hms_opt(0, 0, 0).expect("midnight").and_utc());
    }
    None
}

/// Load tweets from a CSV (`id,timestamp,text`, RFC-4180) or JSONL file.
pub fn load_tweets(path: &Path, format: TweetFormat) -> Result<Loaded<Tweet>, CorpusError> {
    let display = path.display().to_string();
    let body = std::fs::read_to_string(path).map_err(|source| CorpusError::Unreadable {
        path: display.clone(),
        source,
    })?;
    let loaded = match format {
        TweetFormat::Csv => load_tweets_csv(&display, &body)?,
        TweetFormat::Jsonl => load_tweets_jsonl(&body),
    };
    if loaded.records.is_empty() {
        return Err(CorpusError::NoValidRows {
            path: display,
            errors: loaded.row_errors.len(),
        });
    }
    Ok(loaded)
}

fn tweet_from_fields(id: &str, timestamp: &str, text: &str) -> Result<Tweet, String> {
    let timestamp = parse_timestamp(timestamp)
        .ok_or_else(|| format!("malformed timestamp {timestamp:?}"))?;
    if text.is_empty() {
        return Err("empty text".to_string());
    }
    Ok(Tweet {
        id: id.to_string(),
        timestamp,
        text: text.to_string(),
    })
}

fn load_tweets_csv(path: &str, body: &str) -> Result<Loaded<Tweet>, CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(body.as_bytes());
    let headers = reader
        .headers()
        .map_err(|source| CorpusError::Csv {
            path: path.to_string(),
            source,
        })?
        .clone();
    let col = |name: &str| -> Result<usize, CorpusError> {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CorpusError::MissingColumn {
                path: path.to_string(),
                column: name.to_string(),
            })
    };
    let (id_col, ts_col, text_col) = (col("id")?, col("timestamp")?, col("text")?);

    let mut records = Vec::new();
    let mut row_errors = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 2; // 1-based, after the header line
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                row_errors.push(RowError {
                    row,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let field = |c: usize| record.get(c).unwrap_or("");
        match tweet_from_fields(field(id_col), field(ts_col), field(text_col)) {
            Ok(t) => records.push(t),
            Err(message) => row_errors.push(RowError { row, message }),
        }
    }
    Ok(Loaded {
        records,
        row_errors,
    })
}

fn load_tweets_jsonl(body: &str) -> Loaded<Tweet> {
    #[derive(Deserialize)]
    struct Line {
        id: serde_json::Value,
        timestamp: String,
        text: String,
    }
    let mut records = Vec::new();
    let mut row_errors = Vec::new();
    for (idx, line) in body.lines().enumerate() {
        let row = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Result<Line, _> = serde_json::from_str(line);
        match parsed {
            Ok(l) => {
                let id = match &l.id {
                    serde_json::Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                match tweet_from_fields(&id, &l.timestamp, &l.text) {
                    Ok(t) => records.push(t),
                    Err(message) => row_errors.push(RowError { row, message }),
                }
            }
            Err(e) => row_errors.push(RowError {
                row,
                message: e.to_string(),
            }),
        }
    }
    Loaded {
        records,
        row_errors,
    }
}

/// Load a `date,close` price CSV. Output is sorted strictly by date;
/// duplicate dates and non-positive prices are reported as row errors and
/// dropped. Date gaps are allowed — downstream joins treat missing days as
/// absent observations.
pub fn load_prices(path: &Path) -> Result<Loaded<PricePoint>, CorpusError> {
    let display = path.display().to_string();
    let body = std::fs::read_to_string(path).map_err(|source| CorpusError::Unreadable {
        path: display.clone(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(body.as_bytes());
    let headers = reader
        .headers()
        .map_err(|source| CorpusError::Csv {
            path: display.clone(),
            source,
        })?
        .clone();
    let col = |name: &str| -> Result<usize, CorpusError> {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CorpusError::MissingColumn {
                path: display.clone(),
                column: name.to_string(),
            })
    };
    let (date_col, close_col) = (col("date")?, col("close")?);

    let mut by_date: BTreeMap<NaiveDate, f64> = BTreeMap::new();
    let mut row_errors = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 2;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                row_errors.push(RowError {
                    row,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let date_raw = record.get(date_col).unwrap_or("").trim();
        let close_raw = record.get(close_col).unwrap_or("").trim();
        let date = match NaiveDate::parse_from_str(date_raw, "%Y-%m-%d") {
            Ok(d) => d,
            Err(_) => {
                row_errors.push(RowError {
                    row,
                    message: format!("malformed date {date_raw:?}"),
                });
                continue;
            }
        };
        let close = match close_raw.parse::<f64>() {
            Ok(c) if c > 0.0 && c.is_finite() => c,
            Ok(c) => {
                row_errors.push(RowError {
                    row,
                    message: format!("non-positive price {c} on {date}"),
                });
                continue;
            }
            Err(_) => {
                row_errors.push(RowError {
                    row,
                    message: format!("malformed price {close_raw:?}"),
                });
                continue;
            }
        };
        if by_date.contains_key(&date) {
            row_errors.push(RowError {
                row,
                message: format!("duplicate date {date}"),
            });
            continue;
        }
        by_date.insert(date, close);
    }
    if by_date.is_empty() {
        return Err(CorpusError::NoValidRows {
            path: display,
            errors: row_errors.len(),
        });
    }
    Ok(Loaded {
        records: by_date
            .into_iter()
            .map(|(date, close)| PricePoint { date, close })
            .collect(),
        row_errors,
    })
}

/// Keep exactly the tweets whose text contains at least one emoji token.
pub fn filter_emoji_tweets(tweets: Vec<Tweet>) -> Vec<Tweet> {
    filter_emoji_tweets_with(EmojiTables::bundled(), tweets)
}

/// [`filter_emoji_tweets`] against caller-supplied tables.
pub fn filter_emoji_tweets_with(tables: &EmojiTables, tweets: Vec<Tweet>) -> Vec<Tweet> {
    tweets
        .into_iter()
        .filter(|t| !extract_emojis_with(tables, &t.text).is_empty())
        .collect()
}

/// Draw up to `sample_size` tweets per UTC calendar day, without
/// replacement, by partial Fisher-Yates over the day's tweets in input
/// order. Each day's draw is seeded by `seed` mixed with the day number,
/// so output is a pure function of (input, seed).
pub fn sample_daily(tweets: &[Tweet], sample_size: usize, seed: u64) -> Vec<DailySample> {
    assert!(sample_size > 0, "sample_size must be positive");
    let mut by_day: BTreeMap<NaiveDate, Vec<&Tweet>> = BTreeMap::new();
    for t in tweets {
        by_day.entry(t.day()).or_default().push(t);
    }
    by_day
        .into_iter()
        .map(|(date, day_tweets)| {
            let day_seed =
                seed ^ (date.num_days_from_ce() as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            let mut rng = SplitMix64::new(day_seed);
            let picks = sample_indices(&mut rng, day_tweets.len(), sample_size);
            DailySample {
                date,
                tweets: picks.into_iter().map(|i| day_tweets[i].clone()).collect(),
                seed,
            }
        })
        .collect()
}
