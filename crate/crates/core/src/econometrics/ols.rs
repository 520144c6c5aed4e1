//! Ordinary least squares with an intercept, classical standard errors,
//! and adjusted R-squared.

use statrs::distribution::{ContinuousCDF, StudentsT};

use super::linalg;
use super::{
    stars_for, AlignedSample, Coefficient, EconError, FitStatistic, ModelKind, RegressionReport,
};

/// Fit `y = a0 + a1 x1 (+ a2 x2 ...) + e` by least squares.
///
/// Standard errors are classical homoskedastic; p-values use the t
/// distribution with `n - k` degrees of freedom (k columns including the
/// intercept).
pub fn ols_fit(sample: &AlignedSample) -> Result<RegressionReport, EconError> {
    let n = sample.response.len();
    let k = sample.predictors.len() + 1;
    if n < 3 || n <= k {
        return Err(EconError::TooFewRows { got: n, need: 3.max(k + 1) });
    }

    // Normal equations over the design [1, x1, x2, ...].
    let x = |i: usize, j: usize| -> f64 {
        if j == 0 {
            1.0
        } else {
            sample.predictors[j - 1][i]
        }
    };
    let mut xtx = vec![vec![0.0; k]; k];
    let mut xty = vec![0.0; k];
    for i in 0..n {
        for a in 0..k {
            xty[a] += x(i, a) * sample.response[i];
            for b in 0..k {
                xtx[a][b] += x(i, a) * x(i, b);
            }
        }
    }
    let beta = linalg::solve(&xtx, &xty).ok_or(EconError::SingularDesign)?;
    let xtx_inv = linalg::invert(&xtx).ok_or(EconError::SingularDesign)?;

    let mut rss = 0.0;
    for i in 0..n {
        let mut fitted = 0.0;
        for (a, b) in beta.iter().enumerate() {
            fitted += b * x(i, a);
        }
        let r = sample.response[i] - fitted;
        rss += r * r;
    }
    let mean_y = sample.response.iter().sum::<f64>() / n as f64;
    let tss: f64 = sample.response.iter().map(|y| (y - mean_y).powi(2)).sum();
    let r_squared = if tss > 0.0 { 1.0 - rss / tss } else { 0.0 };
    let adj_r_squared = 1.0 - (1.0 - r_squared) * (n as f64 - 1.0) / (n - k) as f64;

    let df = (n - k) as f64;
    let sigma2 = rss / df;
    let t_dist = StudentsT::new(0.0, 1.0, df).expect("valid dof");
    let mut coefficients = Vec::with_capacity(k);
    for j in 0..k {
        let estimate = beta[j];
        let std_error = (sigma2 * xtx_inv[j][j]).max(0.0).sqrt();
        let p_value = if std_error > 0.0 {
            2.0 * (1.0 - t_dist.cdf((estimate / std_error).abs()))
        } else if estimate == 0.0 {
            1.0
        } else {
            0.0
        };
        let name = if j == 0 {
            "const".to_string()
        } else {
            sample.predictor_names[j - 1].clone()
        };
        coefficients.push(Coefficient {
            name,
            estimate,
            std_error,
            p_value,
            stars: stars_for(p_value).to_string(),
        });
    }

    Ok(RegressionReport {
        model: ModelKind::Ols,
        coefficients,
        n_obs: n,
        fit: FitStatistic::AdjRSquared(adj_r_squared),
        lag_days: sample.lag_days,
        logit: None,
    })
}
