//! End-to-end checks of the binary: exit codes, determinism, and the
//! shape of emitted files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_emoji-sentiment")
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn fixture_args<'a>(out_dir: &'a str, extra: &[&'a str]) -> Vec<String> {
    let f = fixtures();
    let mut args: Vec<String> = vec![
        "--tweets".into(),
        f.join("tweets.csv").display().to_string(),
        "--prices".into(),
        f.join("prices.csv").display().to_string(),
        "--out-dir".into(),
        out_dir.into(),
    ];
    args.extend(extra.iter().map(|s| s.to_string()));
    args
}

#[test]
fn verify_exits_zero_and_prints_one_line_per_check() {
    let out = run(&["verify"]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    let pass_lines = stdout.lines().filter(|l| l.starts_with("PASS:")).count();
    assert_eq!(pass_lines, 3, "{stdout}");
}

#[test]
fn missing_input_exits_two() {
    let out = run(&["score", "--tweets", "/nonexistent.csv", "--prices", "/nonexistent2.csv"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("error:"), "{stderr}");
}

#[test]
fn unknown_config_key_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "unknown_key = 5\n").unwrap();
    let out = run(&["score", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn score_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let out_c = dir.path().join("c");
    for (out_dir, seed) in [(&out_a, "1"), (&out_b, "1"), (&out_c, "2")] {
        let mut args = vec!["score".to_string()];
        args.extend(fixture_args(out_dir.to_str().unwrap(), &["--seed", seed]));
        let out = run(&args.iter().map(String::as_str).collect::<Vec<_>>());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(out_a.join("scored_tweets.csv")).unwrap();
    let b = std::fs::read(out_b.join("scored_tweets.csv")).unwrap();
    let c = std::fs::read(out_c.join("scored_tweets.csv")).unwrap();
    assert_eq!(a, b, "same seed must be byte-identical");
    assert_ne!(a, c, "different seeds should draw different samples");
}

#[test]
fn aggregate_emits_the_documented_header() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["aggregate".to_string()];
    args.extend(fixture_args(dir.path().to_str().unwrap(), &[]));
    let out = run(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("daily_sentiment.csv")).unwrap();
    assert!(csv.starts_with("date,count,short,median,avgtop_5,avgtop_10,avgbottom_5,avgbottom_10\n"));
}

#[test]
fn index_command_supports_precomputed_series() {
    let dir = tempfile::tempdir().unwrap();
    let precomputed = dir.path().join("given_index.csv");
    std::fs::write(
        &precomputed,
        "date,value\n2019-03-08,30.0\n2019-03-09,31.0\n2019-03-15,29.0\n2019-03-16,33.5\n",
    )
    .unwrap();
    let mut args = vec!["index".to_string()];
    args.extend(fixture_args(
        dir.path().to_str().unwrap(),
        &["--index", precomputed.to_str().unwrap()],
    ));
    let out = run(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("volindex.csv")).unwrap();
    assert!(csv.starts_with("date,value,delta_week,dir_week\n"));
    // 03-08 -> 03-15 horizon exists: delta -1, direction 0
    let row = csv.lines().nth(1).unwrap();
    assert!(row.contains(",0"), "{row}");
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn sweep_emits_the_default_grid() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["sweep".to_string()];
    args.extend(fixture_args(dir.path().to_str().unwrap(), &[]));
    let out = run(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "pace,n_2,n_3,n_4,n_5,n_6,n_7,n_8,n_9,n_10");
    assert_eq!(csv.lines().count() - 1, 60, "60 pace rows");
}

#[test]
fn backtest_writes_trades_and_path() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["backtest".to_string()];
    args.extend(fixture_args(
        dir.path().to_str().unwrap(),
        &["--pace", "7", "--empty-window", "no-trade"],
    ));
    let out = run(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trades = std::fs::read_to_string(dir.path().join("trades.csv")).unwrap();
    assert!(trades.starts_with("date,buy_price,sell_price,pnl\n"));
    assert!(trades.lines().count() > 1, "strategy should trade at least once");
    let path = std::fs::read_to_string(dir.path().join("cumulative.csv")).unwrap();
    assert!(path.starts_with("date,strategy_cum,baseline_cum\n"));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("strategy profit"), "{stdout}");
}

#[test]
fn regress_reports_tables_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixtures();
    let mut args = vec!["regress".to_string()];
    args.extend(fixture_args(
        dir.path().to_str().unwrap(),
        &[
            "--text-sentiment",
            &f.join("text_sentiment.csv").display().to_string(),
        ],
    ));
    let out = run(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("regressions.json")).unwrap())
            .unwrap();
    let price = json.get("price_on_sentiment").unwrap();
    for key in ["top5avg", "top10avg", "bottom5avg", "bottom10avg"] {
        let report = price.get(key).unwrap_or_else(|| panic!("missing {key}"));
        assert_eq!(report["lag_days"], 1);
        assert_eq!(report["coefficients"].as_array().unwrap().len(), 2);
    }
    assert!(json.get("comparison").unwrap().is_object());
    let text = std::fs::read_to_string(dir.path().join("regressions.txt")).unwrap();
    assert!(text.contains("Observation"));
    assert!(text.contains("Adj_R2"));
    assert!(text.contains("(1) top5avg"));
}

#[test]
fn replay_with_tampered_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixtures();
    // local copies so the input can be modified after the run
    let tweets = dir.path().join("tweets.csv");
    let prices = dir.path().join("prices.csv");
    std::fs::copy(f.join("tweets.csv"), &tweets).unwrap();
    std::fs::copy(f.join("prices.csv"), &prices).unwrap();
    let out_a = dir.path().join("a");
    let out = run(&[
        "pipeline",
        "--tweets",
        tweets.to_str().unwrap(),
        "--prices",
        prices.to_str().unwrap(),
        "--out-dir",
        out_a.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let mut body = std::fs::read_to_string(&prices).unwrap();
    body.push_str("2029-01-01,1.0\n");
    std::fs::write(&prices, body).unwrap();
    let out = run(&[
        "pipeline",
        "--from-manifest",
        out_a.join("manifest.json").to_str().unwrap(),
        "--out-dir",
        dir.path().join("b").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("changed since the manifest"), "{stderr}");
}

#[test]
fn empty_window_flag_accepts_the_documented_spelling() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["backtest".to_string()];
    args.extend(fixture_args(
        dir.path().to_str().unwrap(),
        &["--empty-window", "no_trade"],
    ));
    let out = run(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn config_file_defaults_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixtures();
    let cfg_path = dir.path().join("run.toml");
    std::fs::write(
        &cfg_path,
        format!(
            "tweets = {:?}\nprices = {:?}\nseed = 5\nsample_size = 10\n",
            f.join("tweets.csv").display().to_string(),
            f.join("prices.csv").display().to_string(),
        ),
    )
    .unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    // config seed 5
    let out = run(&[
        "score",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out-dir",
        out_a.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // flag overrides config seed
    let out = run(&[
        "score",
        "--config",
        cfg_path.to_str().unwrap(),
        "--seed",
        "5",
        "--out-dir",
        out_b.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let a = std::fs::read(out_a.join("scored_tweets.csv")).unwrap();
    let b = std::fs::read(out_b.join("scored_tweets.csv")).unwrap();
    assert_eq!(a, b, "explicit flag equal to config value changes nothing");
}
