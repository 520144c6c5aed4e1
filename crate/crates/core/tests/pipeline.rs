//! Cross-module integration: synthetic corpus through sampling, scoring,
//! aggregation, the volatility index, regressions, and the backtest.

use std::collections::BTreeSet;

use chrono::NaiveDate;

use emoji_sentiment::aggregate::{build_daily_series, series_column, SeriesColumn};
use emoji_sentiment::backtest::{run_strategy, StrategyConfig};
use emoji_sentiment::corpus::{filter_emoji_tweets, sample_daily};
use emoji_sentiment::econometrics::{align, logit_fit, ols_fit};
use emoji_sentiment::sentiment::Scorer;
use emoji_sentiment::synth::{planted_prices, synth_tweets, SynthCorpusConfig};
use emoji_sentiment::volindex::{EwmaConfig, VolIndexSeries};

#[test]
fn full_pipeline_over_synthetic_corpus() {
    let cfg = SynthCorpusConfig {
        seed: 4242,
        days: 90,
        tweets_per_day: 60,
        start: NaiveDate::from_ymd_opt(2019, 3, 8).unwrap(),
    };
    let tweets = synth_tweets(&cfg);
    let emoji_tweets = filter_emoji_tweets(tweets);
    assert_eq!(emoji_tweets.len(), 90 * 60, "synthetic corpus is all-emoji");

    let samples = sample_daily(&emoji_tweets, 50, cfg.seed);
    assert_eq!(samples.len(), 90);
    assert!(samples.iter().all(|s| s.tweets.len() == 50));

    let sampled: Vec<_> = samples.into_iter().flat_map(|s| s.tweets).collect();
    let scored = Scorer::bundled().score_tweets(&sampled);
    let daily = build_daily_series(&scored, &BTreeSet::from([5, 10]));
    assert_eq!(daily.len(), 90);
    for d in &daily {
        assert_eq!(d.count, 50);
        assert!(!d.short);
        assert!(d.avgtop[&5] >= d.median && d.median >= d.avgbottom[&5]);
    }

    let avgtop5 = series_column(&daily, SeriesColumn::AvgTop(5), true);
    let prices = planted_prices(&avgtop5, 2500.0, 18_000.0, 300.0, 9_001);
    let price_series: Vec<(NaiveDate, f64)> =
        prices.iter().map(|p| (p.date, p.close)).collect();

    // Eq. 3 form: next-day price on today's top-5 average
    let sample = align(&avgtop5, &price_series, 1, "top5avg").unwrap();
    assert_eq!(sample.len(), 90);
    let report = ols_fit(&sample).unwrap();
    let slope = &report.coefficients[1];
    assert!(slope.estimate > 0.0, "planted loading has the wrong sign");
    assert!(slope.p_value < 0.01, "planted loading not detected");

    // volatility index over the planted prices, weekly delta regressions
    let index = VolIndexSeries::from_prices(&prices, &EwmaConfig::default()).unwrap();
    assert_eq!(index.points.len(), prices.len() - 1);
    assert!(!index.delta_week.is_empty());
    let median = series_column(&daily, SeriesColumn::Median, true);
    let delta_fit = ols_fit(&align(&median, &index.delta_series(), 0, "median").unwrap());
    assert!(delta_fit.is_ok());
    let dirs = index.dir_series();
    let have_both_classes = dirs.iter().any(|(_, v)| *v == 0.0) && dirs.iter().any(|(_, v)| *v == 1.0);
    if have_both_classes {
        // mean-reverting planted prices give a two-class direction series
        let dir_fit = logit_fit(&align(&median, &dirs, 0, "median").unwrap());
        assert!(dir_fit.is_ok(), "{dir_fit:?}");
    }

    // the backtest runs and its oracle agrees
    let strategy = StrategyConfig::default();
    let result = run_strategy(&avgtop5, &price_series, &strategy).unwrap();
    assert!(emoji_sentiment::backtest::verify_against_oracle(
        &result,
        &avgtop5,
        &price_series,
        &strategy
    ));
}

#[test]
fn comparison_separates_planted_from_null_predictor() {
    // 100 seeded replications with signal planted only on the emoji
    // column: the emoji slope must come out significant and the text
    // slope not, in at least 95 of them.
    use emoji_sentiment::econometrics::{compare_predictors, AlignedSample};
    use emoji_sentiment::rng::SplitMix64;

    let mut both_correct = 0;
    for seed in 0..100u64 {
        let mut rng = SplitMix64::new(900 + seed);
        let n = 60;
        let emoji: Vec<f64> = (0..n).map(|_| rng.next_f64() * 2.0 - 1.0).collect();
        let text: Vec<f64> = (0..n).map(|_| rng.next_f64() * 2.0 - 1.0).collect();
        let y: Vec<f64> = emoji
            .iter()
            .map(|e| 3000.0 + 800.0 * e + 200.0 * rng.next_gaussian())
            .collect();
        let sample = AlignedSample::from_columns(
            vec![("text_sentiment".into(), text), ("emoji_sentiment".into(), emoji)],
            y,
            1,
        );
        let cmp = compare_predictors(&sample).unwrap();
        let joint = &cmp.joint;
        let emoji_slope = joint.slope("emoji_sentiment").unwrap();
        let text_slope = joint.slope("text_sentiment").unwrap();
        if emoji_slope.p_value < 0.05 && text_slope.p_value >= 0.05 {
            both_correct += 1;
        }
        // stars always re-derivable from the reported p-values
        for c in &joint.coefficients {
            assert_eq!(
                c.stars,
                emoji_sentiment::econometrics::stars_for(c.p_value)
            );
        }
    }
    assert!(
        both_correct >= 95,
        "signal attribution correct in only {both_correct}/100 replications"
    );
}

#[test]
fn daily_series_equal_with_and_without_sampling_order() {
    // aggregation is permutation-invariant in tweet order
    let cfg = SynthCorpusConfig {
        seed: 7,
        days: 10,
        tweets_per_day: 20,
        ..SynthCorpusConfig::default()
    };
    let tweets = synth_tweets(&cfg);
    let scorer = Scorer::bundled();
    let mut scored = scorer.score_tweets(&tweets);
    let forward = build_daily_series(&scored, &BTreeSet::from([5]));
    scored.reverse();
    let backward = build_daily_series(&scored, &BTreeSet::from([5]));
    for (a, b) in forward.iter().zip(&backward) {
        assert_eq!(a.date, b.date);
        assert_eq!(a.median, b.median);
        assert_eq!(a.avgtop, b.avgtop);
        assert_eq!(a.avgbottom, b.avgbottom);
    }
}
