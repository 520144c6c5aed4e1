//! Independent re-computation oracles behind the `verify` command.
//!
//! Each oracle recomputes a module's result along a deliberately different
//! code path: the backtest as a naive day-by-day re-simulation, OLS through
//! the closed-form normal equations, and the EWMA recursion as the fully
//! unrolled geometric sum. [`run_all`] drives seeded harnesses over all
//! three and reports one outcome per check.

use chrono::{Days, NaiveDate};

use crate::backtest::{
    run_strategy, BacktestError, Benchmark, EmptyWindowPolicy, StrategyConfig,
};
use crate::econometrics::{ols_fit, AlignedSample, FitStatistic};
use crate::rng::SplitMix64;
use crate::volindex::{ewma_variance, initial_variance, EwmaConfig};

/// Result of one oracle check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Naive re-simulation of the trading rule: no shared state with
/// `run_strategy`, window sums recomputed with iterator folds.
pub fn naive_resimulation(
    sentiment: &[(NaiveDate, f64)],
    prices: &[(NaiveDate, f64)],
    cfg: &StrategyConfig,
) -> Result<Vec<(NaiveDate, f64)>, BacktestError> {
    let joined = crate::backtest::join_on_dates(sentiment, prices);
    if joined.len() < 2 {
        return Err(BacktestError::TooFewCommonDates(joined.len()));
    }
    let mut pnl = Vec::new();
    for day in 0..joined.len() - 1 {
        let window: &[(NaiveDate, f64, f64)] = match cfg.benchmark {
            Benchmark::Cumulative => &joined[..day],
            Benchmark::Moving { pace } => &joined[day.saturating_sub(pace)..day],
        };
        let decision = if window.is_empty() {
            cfg.empty_window_policy == EmptyWindowPolicy::Trade
        } else {
            let mean = window.iter().map(|(_, s, _)| *s).sum::<f64>() / window.len() as f64;
            joined[day].1 >= mean
        };
        let profit = if decision {
            joined[day + 1].2 - joined[day].2
        } else {
            0.0
        };
        pnl.push((joined[day].0, profit));
    }
    Ok(pnl)
}

/// Closed-form single-predictor OLS: slope/intercept from the moment
/// sums, classical standard errors, adjusted R-squared.
pub struct ClosedFormOls {
    pub intercept: f64,
    pub slope: f64,
    pub se_intercept: f64,
    pub se_slope: f64,
    pub adj_r_squared: f64,
}

pub fn ols_closed_form(x: &[f64], y: &[f64]) -> Option<ClosedFormOls> {
    let n = x.len();
    if n < 3 || y.len() != n {
        return None;
    }
    let nf = n as f64;
    let mean_x = x.iter().sum::<f64>() / nf;
    let mean_y = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mean_x).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mean_x) * (b - mean_y)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let tss: f64 = y.iter().map(|v| (v - mean_y).powi(2)).sum();
    let r2 = if tss > 0.0 { 1.0 - rss / tss } else { 0.0 };
    let sigma2 = rss / (nf - 2.0);
    Some(ClosedFormOls {
        intercept,
        slope,
        se_intercept: (sigma2 * (1.0 / nf + mean_x * mean_x / sxx)).sqrt(),
        se_slope: (sigma2 / sxx).sqrt(),
        adj_r_squared: 1.0 - (1.0 - r2) * (nf - 1.0) / (nf - 2.0),
    })
}

/// Fully unrolled EWMA: `sigma2[t] = l^t s0 + (1-l) sum l^(t-k) r_k^2`.
pub fn ewma_unrolled(returns: &[f64], cfg: &EwmaConfig) -> Vec<f64> {
    let s0 = initial_variance(returns, cfg);
    let l = cfg.lambda;
    (1..=returns.len())
        .map(|t| {
            let mut v = l.powi(t as i32) * s0;
            for (k, r) in returns[..t].iter().enumerate() {
                v += (1.0 - l) * l.powi((t - 1 - k) as i32) * r * r;
            }
            v
        })
        .collect()
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Random quantized price path (multiples of 0.25 stay exact in f64).
fn random_prices(rng: &mut SplitMix64, len: usize) -> Vec<(NaiveDate, f64)> {
    let base = NaiveDate::from_ymd_opt(2019, 3, 8).unwrap();
    let mut price = 4000.0;
    (0..len)
        .map(|i| {
            let step = (rng.next_below(801) as f64 - 400.0) * 0.25;
            price = (price + step).max(100.0);
            (base + Days::new(i as u64), price)
        })
        .collect()
}

fn random_sentiment(rng: &mut SplitMix64, len: usize) -> Vec<(NaiveDate, f64)> {
    let base = NaiveDate::from_ymd_opt(2019, 3, 8).unwrap();
    (0..len)
        .map(|i| (base + Days::new(i as u64), 0.30 + 0.14 * rng.next_f64()))
        .collect()
}

/// Backtest oracle harness: `fixtures` seeded runs across benchmark kinds
/// must re-simulate exactly.
pub fn check_backtest_oracle(seed: u64, fixtures: usize) -> CheckOutcome {
    let mut rng = SplitMix64::new(seed);
    for i in 0..fixtures {
        let len = 30 + (rng.next_below(200) as usize);
        let prices = random_prices(&mut rng, len);
        let sentiment = random_sentiment(&mut rng, len);
        let benchmark = if i % 2 == 0 {
            Benchmark::Cumulative
        } else {
            Benchmark::Moving {
                pace: 1 + rng.next_below(60) as usize,
            }
        };
        let policy = if i % 3 == 0 {
            EmptyWindowPolicy::Trade
        } else {
            EmptyWindowPolicy::NoTrade
        };
        let cfg = StrategyConfig {
            n: 5,
            benchmark,
            empty_window_policy: policy,
        };
        let result = match run_strategy(&sentiment, &prices, &cfg) {
            Ok(r) => r,
            Err(e) => {
                return CheckOutcome {
                    name: "backtest-oracle",
                    passed: false,
                    detail: format!("fixture {i}: {e}"),
                }
            }
        };
        if !crate::backtest::verify_against_oracle(&result, &sentiment, &prices, &cfg) {
            return CheckOutcome {
                name: "backtest-oracle",
                passed: false,
                detail: format!("fixture {i}: re-simulation mismatch"),
            };
        }
    }
    CheckOutcome {
        name: "backtest-oracle",
        passed: true,
        detail: format!("{fixtures} fixtures re-simulated exactly"),
    }
}

/// OLS harness: seeded random samples must match the closed form within
/// `tol` on coefficients, standard errors, and adjusted R-squared.
pub fn check_ols_oracle(seed: u64, samples: usize, n: usize, tol: f64) -> CheckOutcome {
    let mut rng = SplitMix64::new(seed);
    let mut worst = 0.0f64;
    for i in 0..samples {
        let x: Vec<f64> = (0..n).map(|_| rng.next_f64() * 10.0 - 5.0).collect();
        let slope = rng.next_f64() * 4.0 - 2.0;
        let intercept = rng.next_f64() * 100.0;
        let y: Vec<f64> = x
            .iter()
            .map(|v| intercept + slope * v + rng.next_gaussian())
            .collect();
        let report = match ols_fit(&AlignedSample::from_columns(
            vec![("x".into(), x.clone())],
            y.clone(),
            0,
        )) {
            Ok(r) => r,
            Err(e) => {
                return CheckOutcome {
                    name: "ols-normal-equations",
                    passed: false,
                    detail: format!("sample {i}: {e}"),
                }
            }
        };
        let Some(oracle) = ols_closed_form(&x, &y) else {
            return CheckOutcome {
                name: "ols-normal-equations",
                passed: false,
                detail: format!("sample {i}: oracle degenerate"),
            };
        };
        let adj = match report.fit {
            FitStatistic::AdjRSquared(v) => v,
            _ => f64::NAN,
        };
        for gap in [
            relative_gap(report.coefficients[0].estimate, oracle.intercept),
            relative_gap(report.coefficients[1].estimate, oracle.slope),
            relative_gap(report.coefficients[0].std_error, oracle.se_intercept),
            relative_gap(report.coefficients[1].std_error, oracle.se_slope),
            relative_gap(adj, oracle.adj_r_squared),
        ] {
            worst = worst.max(gap);
        }
    }
    CheckOutcome {
        name: "ols-normal-equations",
        passed: worst <= tol,
        detail: format!("{samples} samples, worst relative gap {worst:.3e} (tol {tol:.0e})"),
    }
}

/// EWMA harness: the recursion must match the unrolled sum within `tol`
/// on random return series, and hold the constant-return fixed point
/// exactly.
pub fn check_ewma_oracle(seed: u64, series: usize, len: usize, tol: f64) -> CheckOutcome {
    let mut rng = SplitMix64::new(seed);
    let cfg = EwmaConfig::default();
    let mut worst = 0.0f64;
    for _ in 0..series {
        let returns: Vec<f64> = (0..len).map(|_| rng.next_gaussian() * 0.03).collect();
        let recursive = ewma_variance(&returns, &cfg).expect("valid config");
        let unrolled = ewma_unrolled(&returns, &cfg);
        for (a, b) in recursive.iter().zip(&unrolled) {
            worst = worst.max((a - b).abs());
        }
    }
    let constant = vec![0.02; len.max(8)];
    let fixed_cfg = EwmaConfig {
        init: crate::volindex::VarianceInit::FirstSquaredReturn,
        ..cfg
    };
    let fixed = ewma_variance(&constant, &fixed_cfg).expect("valid config");
    let exact = constant[0] * constant[0];
    let fixed_point_holds = fixed.iter().all(|&v| v == exact);
    CheckOutcome {
        name: "ewma-unroll",
        passed: worst <= tol && fixed_point_holds,
        detail: format!(
            "{series} series, worst absolute gap {worst:.3e} (tol {tol:.0e}), fixed point {}",
            if fixed_point_holds { "exact" } else { "BROKEN" }
        ),
    }
}

/// Run every oracle check with its acceptance-grade parameters.
pub fn run_all(seed: u64) -> Vec<CheckOutcome> {
    vec![
        check_backtest_oracle(seed, 100),
        check_ols_oracle(seed.wrapping_add(1), 50, 20, 1e-9),
        check_ewma_oracle(seed.wrapping_add(2), 100, 100, 1e-12),
    ]
}
