//! EWMA realized-volatility index over a daily price series, with the
//! weekly change and its direction.
//!
//! Variance follows the RiskMetrics-style recursion
//! `sigma2[t] = lambda * sigma2[t-1] + (1 - lambda) * r[t]^2` with
//! `lambda = 0.82` by default; the displayed level is
//! `scale * sqrt(annualization * sigma2[t])`. The recursion is evaluated
//! in delta form so a constant-return series is an exact fixed point.

use std::collections::BTreeMap;

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::PricePoint;
use crate::numfmt::g17;

#[derive(Debug, Error)]
pub enum VolIndexError {
    #[error("need at least {need} price points, got {got}")]
    TooShort { need: usize, got: usize },
    #[error("non-positive price {price} at index {index}")]
    NonPositivePrice { index: usize, price: f64 },
    #[error("lambda must lie in (0, 1), got {0}")]
    BadLambda(f64),
}

/// How the variance recursion is seeded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum VarianceInit {
    /// Mean of the first `min(window, n)` squared returns.
    MeanSquaredWindow(usize),
    /// The first squared return alone.
    FirstSquaredReturn,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EwmaConfig {
    /// Decay parameter in (0, 1).
    pub lambda: f64,
    /// Horizon for the weekly delta, in calendar days.
    pub horizon_days: u32,
    /// Display multiplier for the index level.
    pub scale: f64,
    /// Annualization factor under the square root (365: crypto trades
    /// every day).
    pub annualization: f64,
    pub init: VarianceInit,
}

impl Default for EwmaConfig {
    fn default() -> Self {
        EwmaConfig {
            lambda: 0.82,
            horizon_days: 7,
            scale: 100.0,
            annualization: 365.0,
            init: VarianceInit::MeanSquaredWindow(7),
        }
    }
}

impl EwmaConfig {
    pub fn validate(&self) -> Result<(), VolIndexError> {
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(VolIndexError::BadLambda(self.lambda));
        }
        Ok(())
    }
}

/// Log returns `r[t] = ln(p[t] / p[t-1])`; output length is `n - 1`.
pub fn log_returns(prices: &[PricePoint]) -> Result<Vec<f64>, VolIndexError> {
    if prices.len() < 2 {
        return Err(VolIndexError::TooShort {
            need: 2,
            got: prices.len(),
        });
    }
    for (i, p) in prices.iter().enumerate() {
        if !(p.close > 0.0) {
            return Err(VolIndexError::NonPositivePrice {
                index: i,
                price: p.close,
            });
        }
    }
    Ok(prices
        .windows(2)
        .map(|w| (w[1].close / w[0].close).ln())
        .collect())
}

/// Seed variance per the configured initialization.
pub fn initial_variance(returns: &[f64], cfg: &EwmaConfig) -> f64 {
    match cfg.init {
        VarianceInit::FirstSquaredReturn => returns.first().map_or(0.0, |r| r * r),
        VarianceInit::MeanSquaredWindow(window) => {
            let m = window.min(returns.len()).max(1);
            returns[..m].iter().map(|r| r * r).sum::<f64>() / m as f64
        }
    }
}

/// EWMA variance series: `sigma2[t]` for `t = 1..=n` given `n` returns.
///
/// Evaluated as `sigma2 += (1 - lambda) * (r^2 - sigma2)`, algebraically
/// the textbook recursion but exact at the constant-return fixed point.
pub fn ewma_variance(returns: &[f64], cfg: &EwmaConfig) -> Result<Vec<f64>, VolIndexError> {
    cfg.validate()?;
    if returns.is_empty() {
        return Err(VolIndexError::TooShort { need: 1, got: 0 });
    }
    let weight = 1.0 - cfg.lambda;
    let mut sigma2 = initial_variance(returns, cfg);
    let mut out = Vec::with_capacity(returns.len());
    for r in returns {
        sigma2 += weight * (r * r - sigma2);
        // clamp tiny negative round-off
        if sigma2 < 0.0 {
            sigma2 = 0.0;
        }
        out.push(sigma2);
    }
    Ok(out)
}

/// Index level for one variance value.
pub fn index_level(variance: f64, cfg: &EwmaConfig) -> f64 {
    cfg.scale * (cfg.annualization * variance).sqrt()
}

/// The computed index: one level per date, plus the weekly delta and its
/// direction where the horizon date exists.
#[derive(Debug, Clone)]
pub struct VolIndexSeries {
    pub points: Vec<(NaiveDate, f64)>,
    pub delta_week: BTreeMap<NaiveDate, f64>,
    pub dir_week: BTreeMap<NaiveDate, u8>,
}

impl VolIndexSeries {
    /// Compute the index from a price series. Levels are dated from the
    /// second price onward (returns are one shorter than prices).
    pub fn from_prices(prices: &[PricePoint], cfg: &EwmaConfig) -> Result<Self, VolIndexError> {
        let returns = log_returns(prices)?;
        let variances = ewma_variance(&returns, cfg)?;
        let points: Vec<(NaiveDate, f64)> = prices[1..]
            .iter()
            .zip(&variances)
            .map(|(p, &v)| (p.date, index_level(v, cfg)))
            .collect();
        Ok(Self::from_points(points, cfg.horizon_days))
    }

    /// Wrap an existing (e.g. externally published) index series.
    pub fn from_points(points: Vec<(NaiveDate, f64)>, horizon_days: u32) -> Self {
        let (delta_week, dir_week) = weekly_delta_and_direction(&points, horizon_days);
        VolIndexSeries {
            points,
            delta_week,
            dir_week,
        }
    }

    /// `date,value,delta_week,dir_week` CSV; delta/dir cells are empty
    /// where the horizon date is missing.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("date,value,delta_week,dir_week\n");
        for (date, value) in &self.points {
            let delta = self
                .delta_week
                .get(date)
                .map(|d| g17(*d))
                .unwrap_or_default();
            let dir = self
                .dir_week
                .get(date)
                .map(|d| d.to_string())
                .unwrap_or_default();
            out.push_str(&format!("{date},{},{delta},{dir}\n", g17(*value)));
        }
        out
    }

    /// Delta series as dated points (regression input).
    pub fn delta_series(&self) -> Vec<(NaiveDate, f64)> {
        self.delta_week.iter().map(|(d, v)| (*d, *v)).collect()
    }

    /// Direction series as dated 0/1 points (regression input).
    pub fn dir_series(&self) -> Vec<(NaiveDate, f64)> {
        self.dir_week.iter().map(|(d, v)| (*d, *v as f64)).collect()
    }
}

/// `delta(t) = value(t + horizon) - value(t)` wherever the horizon date is
/// observed; `dir(t) = 1` iff `delta(t) > 0` strictly.
pub fn weekly_delta_and_direction(
    points: &[(NaiveDate, f64)],
    horizon_days: u32,
) -> (BTreeMap<NaiveDate, f64>, BTreeMap<NaiveDate, u8>) {
    let by_date: BTreeMap<NaiveDate, f64> = points.iter().copied().collect();
    let mut delta = BTreeMap::new();
    let mut dir = BTreeMap::new();
    for (date, value) in points {
        let Some(ahead) = date.checked_add_days(Days::new(horizon_days as u64)) else {
            continue;
        };
        if let Some(future) = by_date.get(&ahead) {
            let d = future - value;
            delta.insert(*date, d);
            dir.insert(*date, u8::from(d > 0.0));
        }
    }
    (delta, dir)
}

/// Parse a `date,value` CSV into index points (for precomputed series).
pub fn parse_index_csv(body: &str) -> Result<Vec<(NaiveDate, f64)>, String> {
    let mut reader = csv::ReaderBuilder::new().from_reader(body.as_bytes());
    let headers = reader.headers().map_err(|e| e.to_string())?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| format!("missing column {name:?}"))
    };
    let (date_col, value_col) = (col("date")?, col("value")?);
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| e.to_string())?;
        let date = NaiveDate::parse_from_str(record.get(date_col).unwrap_or("").trim(), "%Y-%m-%d")
            .map_err(|e| e.to_string())?;
        let value: f64 = record
            .get(value_col)
            .unwrap_or("")
            .trim()
            .parse()
            .map_err(|e: std::num::ParseFloatError| e.to_string())?;
        points.push((date, value));
    }
    Ok(points)
}
