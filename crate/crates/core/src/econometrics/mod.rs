//! Regression and correlation tooling: lagged alignment, OLS, IRLS
//! logistic regression, signed rescaling, Fisher-Z, and the side-by-side
//! predictor comparison.

mod linalg;
mod logit;
mod ols;

pub use logit::logit_fit;
pub use ols::ols_fit;

use std::collections::BTreeMap;

use chrono::{Days, NaiveDate};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EconError {
    #[error("no overlapping dates after applying lag")]
    EmptyIntersection,
    #[error("too few rows: got {got}, need at least {need}")]
    TooFewRows { got: usize, need: usize },
    #[error("singular design (constant or collinear predictor)")]
    SingularDesign,
    #[error("response must be 0/1")]
    NonBinaryResponse,
    #[error("single-class response")]
    SingleClassResponse,
    #[error("complete separation detected; logit coefficients diverge")]
    CompleteSeparation,
    #[error("constant input")]
    ConstantInput,
    #[error("correlation {0} outside (-1, 1)")]
    CorrelationOutOfRange(f64),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// Rows pairing predictor values at date `d` with the response observed
/// `lag_days` later. Dates with either side missing are dropped.
#[derive(Debug, Clone)]
pub struct AlignedSample {
    /// Date of the predictor observation for each row.
    pub dates: Vec<NaiveDate>,
    /// Column-major predictor values (one inner vec per predictor).
    pub predictors: Vec<Vec<f64>>,
    pub predictor_names: Vec<String>,
    pub response: Vec<f64>,
    pub lag_days: i64,
}

impl AlignedSample {
    /// Assemble directly from columns (rows already aligned).
    pub fn from_columns(
        predictors: Vec<(String, Vec<f64>)>,
        response: Vec<f64>,
        lag_days: i64,
    ) -> AlignedSample {
        let (predictor_names, predictors): (Vec<_>, Vec<_>) = predictors.into_iter().unzip();
        AlignedSample {
            dates: Vec::new(),
            predictors,
            predictor_names,
            response,
            lag_days,
        }
    }

    pub fn len(&self) -> usize {
        self.response.len()
    }

    pub fn is_empty(&self) -> bool {
        self.response.is_empty()
    }

    /// Single-predictor view of column `j` over the same rows.
    pub fn single(&self, j: usize) -> AlignedSample {
        AlignedSample {
            dates: self.dates.clone(),
            predictors: vec![self.predictors[j].clone()],
            predictor_names: vec![self.predictor_names[j].clone()],
            response: self.response.clone(),
            lag_days: self.lag_days,
        }
    }
}

/// Pair `x` at date `d` with `y` at `d + lag_days` for every `d` where
/// both exist.
pub fn align(
    xs: &[(NaiveDate, f64)],
    ys: &[(NaiveDate, f64)],
    lag_days: i64,
    predictor_name: &str,
) -> Result<AlignedSample, EconError> {
    align_multi(&[(predictor_name, xs)], ys, lag_days)
}

/// Multi-predictor alignment: rows keep dates where every predictor and
/// the lagged response are all observed.
pub fn align_multi(
    xs: &[(&str, &[(NaiveDate, f64)])],
    ys: &[(NaiveDate, f64)],
    lag_days: i64,
) -> Result<AlignedSample, EconError> {
    let y_by_date: BTreeMap<NaiveDate, f64> = ys.iter().copied().collect();
    let maps: Vec<BTreeMap<NaiveDate, f64>> = xs
        .iter()
        .map(|(_, series)| series.iter().copied().collect())
        .collect();

    let mut dates = Vec::new();
    let mut predictors = vec![Vec::new(); xs.len()];
    let mut response = Vec::new();
    for (&date, &x0) in &maps[0] {
        let shifted = if lag_days >= 0 {
            date.checked_add_days(Days::new(lag_days as u64))
        } else {
            date.checked_sub_days(Days::new(lag_days.unsigned_abs()))
        };
        let Some(shifted) = shifted else { continue };
        let Some(&y) = y_by_date.get(&shifted) else {
            continue;
        };
        let mut row = vec![x0];
        let mut complete = true;
        for m in &maps[1..] {
            match m.get(&date) {
                Some(&v) => row.push(v),
                None => {
                    complete = false;
                    break;
                }
            }
        }
        if !complete {
            continue;
        }
        dates.push(date);
        for (col, v) in predictors.iter_mut().zip(&row) {
            col.push(*v);
        }
        response.push(y);
    }
    if dates.is_empty() {
        return Err(EconError::EmptyIntersection);
    }
    Ok(AlignedSample {
        dates,
        predictors,
        predictor_names: xs.iter().map(|(n, _)| n.to_string()).collect(),
        response,
        lag_days,
    })
}

/// Significance markers from a two-sided p-value.
pub fn stars_for(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.1 {
        "*"
    } else {
        ""
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Ols,
    Logit,
}

#[derive(Debug, Clone, Serialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub p_value: f64,
    pub stars: String,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub enum FitStatistic {
    #[serde(rename = "adj_r_squared")]
    AdjRSquared(f64),
    #[serde(rename = "mcfadden_pseudo_r_squared")]
    McFaddenPseudoRSquared(f64),
}

impl FitStatistic {
    pub fn value(&self) -> f64 {
        match self {
            FitStatistic::AdjRSquared(v) | FitStatistic::McFaddenPseudoRSquared(v) => *v,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            FitStatistic::AdjRSquared(_) => "Adj_R2",
            FitStatistic::McFaddenPseudoRSquared(_) => "Pseudo_R2 (McFadden)",
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LogitDiagnostics {
    pub converged: bool,
    pub iterations: usize,
    /// Euclidean norm of the score vector at the reported solution.
    pub score_norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegressionReport {
    pub model: ModelKind,
    /// Intercept first, then one entry per predictor.
    pub coefficients: Vec<Coefficient>,
    pub n_obs: usize,
    pub fit: FitStatistic,
    pub lag_days: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub logit: Option<LogitDiagnostics>,
}

impl RegressionReport {
    pub fn intercept(&self) -> &Coefficient {
        &self.coefficients[0]
    }

    pub fn slope(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().skip(1).find(|c| c.name == name)
    }
}

fn format_value(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 1e4 || v.abs() < 1e-3 {
        format!("{v:.3e}")
    } else {
        format!("{v:.4}")
    }
}

/// Plain-text table over one or more fitted models: coefficient with
/// stars, standard error in parentheses, then lag, observations, and the
/// fit statistic, one column per model.
pub fn render_table(title: &str, column_labels: &[String], reports: &[RegressionReport]) -> String {
    assert_eq!(column_labels.len(), reports.len());
    let mut rows: Vec<(String, Vec<String>)> = Vec::new();

    let mut slope_names: Vec<String> = Vec::new();
    for r in reports {
        for c in r.coefficients.iter().skip(1) {
            if !slope_names.contains(&c.name) {
                slope_names.push(c.name.clone());
            }
        }
    }
    for name in &slope_names {
        let cells = reports
            .iter()
            .map(|r| match r.slope(name) {
                Some(c) => format!(
                    "{}{} ({})",
                    format_value(c.estimate),
                    c.stars,
                    format_value(c.std_error)
                ),
                None => "-".to_string(),
            })
            .collect();
        rows.push((name.clone(), cells));
    }
    rows.push((
        "const".to_string(),
        reports
            .iter()
            .map(|r| {
                let c = r.intercept();
                format!(
                    "{}{} ({})",
                    format_value(c.estimate),
                    c.stars,
                    format_value(c.std_error)
                )
            })
            .collect(),
    ));
    rows.push((
        "Lag".to_string(),
        reports.iter().map(|r| r.lag_days.to_string()).collect(),
    ));
    rows.push((
        "Observation".to_string(),
        reports.iter().map(|r| r.n_obs.to_string()).collect(),
    ));
    let fit_label = reports
        .first()
        .map(|r| r.fit.label())
        .unwrap_or("Fit");
    rows.push((
        fit_label.to_string(),
        reports
            .iter()
            .map(|r| format!("{:.4}", r.fit.value()))
            .collect(),
    ));

    let label_width = rows
        .iter()
        .map(|(l, _)| l.len())
        .max()
        .unwrap_or(0)
        .max(title.len().min(24));
    let col_widths: Vec<usize> = column_labels
        .iter()
        .enumerate()
        .map(|(j, label)| {
            rows.iter()
                .map(|(_, cells)| cells[j].len())
                .max()
                .unwrap_or(0)
                .max(label.len())
        })
        .collect();

    let mut out = String::new();
    out.push_str(&format!("Y: {title}\n"));
    out.push_str(&format!("{:label_width$}", ""));
    for (label, w) in column_labels.iter().zip(&col_widths) {
        out.push_str(&format!("  {label:>w$}"));
    }
    out.push('\n');
    for (label, cells) in &rows {
        out.push_str(&format!("{label:label_width$}"));
        for (cell, w) in cells.iter().zip(&col_widths) {
            out.push_str(&format!("  {cell:>w$}"));
        }
        out.push('\n');
    }
    out
}

/// Affine map of `xs` onto `[-1, 1]` (min to -1, max to +1).
pub fn rescale_signed(xs: &[f64]) -> Result<Vec<f64>, EconError> {
    let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if xs.is_empty() || !(max > min) {
        return Err(EconError::ConstantInput);
    }
    Ok(xs
        .iter()
        .map(|x| 2.0 * (x - min) / (max - min) - 1.0)
        .collect())
}

/// Fisher variance-stabilizing transform `z = 0.5 ln((1+r)/(1-r))`.
pub fn fisher_z(r: f64) -> Result<f64, EconError> {
    if !(r.abs() < 1.0) {
        return Err(EconError::CorrelationOutOfRange(r));
    }
    Ok(0.5 * ((1.0 + r) / (1.0 - r)).ln())
}

/// Sample Pearson correlation.
pub fn pearson_correlation(xs: &[f64], ys: &[f64]) -> Result<f64, EconError> {
    if xs.len() != ys.len() {
        return Err(EconError::LengthMismatch(xs.len(), ys.len()));
    }
    let n = xs.len();
    if n < 2 {
        return Err(EconError::TooFewRows { got: n, need: 2 });
    }
    let mean_x = xs.iter().sum::<f64>() / n as f64;
    let mean_y = ys.iter().sum::<f64>() / n as f64;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(EconError::ConstantInput);
    }
    Ok(sxy / (sxx.sqrt() * syy.sqrt()))
}

/// The three fits behind the text-vs-emoji comparison: each predictor
/// alone plus the joint model, all over the same rows.
#[derive(Debug, Serialize)]
pub struct PredictorComparison {
    pub singles: Vec<RegressionReport>,
    pub joint: RegressionReport,
}

/// Run the comparison on an aligned two-predictor sample (predictors are
/// expected to be rescaled to `[-1, 1]` upstream).
pub fn compare_predictors(sample: &AlignedSample) -> Result<PredictorComparison, EconError> {
    assert_eq!(
        sample.predictors.len(),
        2,
        "comparison needs exactly two predictors"
    );
    let singles = vec![
        ols_fit(&sample.single(0))?,
        ols_fit(&sample.single(1))?,
    ];
    let joint = ols_fit(sample)?;
    Ok(PredictorComparison { singles, joint })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn date(d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2019, 3, d).unwrap()
    }

    #[test]
    fn align_applies_the_lag() {
        let xs = vec![(date(1), 0.1), (date(2), 0.2)];
        let ys = vec![(date(2), 10.0), (date(3), 20.0)];
        let s = align(&xs, &ys, 1, "x").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.predictors[0], vec![0.1, 0.2]);
        assert_eq!(s.response, vec![10.0, 20.0]);
    }

    #[test]
    fn align_zero_lag_is_inner_join() {
        let xs = vec![(date(1), 0.1), (date(2), 0.2), (date(4), 0.4)];
        let ys = vec![(date(2), 10.0), (date(4), 20.0)];
        let s = align(&xs, &ys, 0, "x").unwrap();
        assert_eq!(s.dates, vec![date(2), date(4)]);
    }

    #[test]
    fn align_drops_rows_missing_y() {
        let xs = vec![(date(1), 0.1), (date(2), 0.2), (date(3), 0.3)];
        let ys = vec![(date(2), 10.0), (date(4), 20.0)];
        let s = align(&xs, &ys, 1, "x").unwrap();
        assert_eq!(s.len(), 2); // d1->d2 and d3->d4
    }

    #[test]
    fn align_empty_intersection_errors() {
        let xs = vec![(date(1), 0.1)];
        let ys = vec![(date(10), 1.0)];
        assert!(matches!(
            align(&xs, &ys, 1, "x"),
            Err(EconError::EmptyIntersection)
        ));
    }

    #[test]
    fn rescale_examples() {
        assert_eq!(
            rescale_signed(&[0.0, 5.0, 10.0]).unwrap(),
            vec![-1.0, 0.0, 1.0]
        );
        assert_eq!(rescale_signed(&[-1.0, 1.0]).unwrap(), vec![-1.0, 1.0]);
        let r = rescale_signed(&[0.304, 0.369, 0.434]).unwrap();
        assert_relative_eq!(r[0], -1.0, epsilon = 1e-12);
        assert_relative_eq!(r[1], 0.0, epsilon = 1e-12);
        assert_relative_eq!(r[2], 1.0, epsilon = 1e-12);
        assert!(matches!(
            rescale_signed(&[2.0, 2.0]),
            Err(EconError::ConstantInput)
        ));
    }

    #[test]
    fn fisher_z_examples() {
        assert_eq!(fisher_z(0.0).unwrap(), 0.0);
        // closed form 0.5 ln(1.288/0.712)
        assert_relative_eq!(
            fisher_z(0.288).unwrap(),
            0.29638399762616163,
            epsilon = 1e-12
        );
        for r in [-0.9, -0.3, 0.1, 0.77] {
            assert_relative_eq!(
                fisher_z(-r).unwrap(),
                -fisher_z(r).unwrap(),
                epsilon = 1e-12
            );
            assert_relative_eq!(fisher_z(r).unwrap().tanh(), r, epsilon = 1e-12);
        }
        assert!(fisher_z(1.0).is_err());
    }

    #[test]
    fn pearson_examples_and_oracle() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let linear: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        assert_relative_eq!(
            pearson_correlation(&xs, &linear).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let negated: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert_relative_eq!(
            pearson_correlation(&xs, &negated).unwrap(),
            -1.0,
            epsilon = 1e-12
        );

        // fixed 10-pair fixture against the direct covariance formula
        let ys = [2.1, 1.7, 3.2, 2.9, 4.8, 4.1, 5.5, 6.9, 6.1, 8.4];
        let n = 10.0;
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(a, b)| a * b).sum();
        let sxx: f64 = xs.iter().map(|a| a * a).sum();
        let syy: f64 = ys.iter().map(|b| b * b).sum();
        let oracle = (n * sxy - sx * sy)
            / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt());
        assert_relative_eq!(
            pearson_correlation(&xs, &ys).unwrap(),
            oracle,
            epsilon = 1e-12
        );
        assert!(pearson_correlation(&[1.0, 1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn comparison_fits_three_models_on_shared_rows() {
        let text: Vec<f64> = (0..20).map(|i| ((i * 7) % 13) as f64 / 13.0 - 0.5).collect();
        let emoji: Vec<f64> = (0..20).map(|i| (i as f64) / 19.0 - 0.5).collect();
        let y: Vec<f64> = emoji.iter().map(|e| 100.0 + 50.0 * e).collect();
        let sample = AlignedSample::from_columns(
            vec![("text".into(), text), ("emoji".into(), emoji)],
            y,
            1,
        );
        let cmp = compare_predictors(&sample).unwrap();
        assert_eq!(cmp.singles.len(), 2);
        assert_eq!(cmp.singles[0].n_obs, cmp.joint.n_obs);
        assert_eq!(cmp.joint.coefficients.len(), 3);
    }

    #[test]
    fn identical_predictors_make_the_joint_design_singular() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 1.0 + v).collect();
        let sample = AlignedSample::from_columns(
            vec![("text".into(), x.clone()), ("emoji".into(), x)],
            y,
            1,
        );
        assert!(matches!(
            compare_predictors(&sample),
            Err(EconError::SingularDesign)
        ));
    }

    #[test]
    fn stars_thresholds() {
        assert_eq!(stars_for(0.005), "***");
        assert_eq!(stars_for(0.03), "**");
        assert_eq!(stars_for(0.07), "*");
        assert_eq!(stars_for(0.2), "");
    }

    #[test]
    fn table_renders_rows() {
        let x: Vec<f64> = (0..10).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 + 2.0 * v + (v * 7.0).sin() * 0.01).collect();
        let report =
            ols_fit(&AlignedSample::from_columns(vec![("top5avg".into(), x)], y, 1)).unwrap();
        let table = render_table("Price_BTC", &["(1) top5avg".into()], &[report]);
        assert!(table.contains("top5avg"));
        assert!(table.contains("Observation"));
        assert!(table.contains("Adj_R2"));
        assert!(table.contains("Lag"));
    }
}
