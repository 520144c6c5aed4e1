//! Binomial logistic regression fit by iteratively reweighted least
//! squares (Newton-Raphson on the log-likelihood).

use statrs::distribution::{ContinuousCDF, Normal};

use super::linalg;
use super::{
    stars_for, AlignedSample, Coefficient, EconError, FitStatistic, LogitDiagnostics, ModelKind,
    RegressionReport,
};

const MAX_ITERATIONS: usize = 100;
const LOGLIK_TOLERANCE: f64 = 1e-8;
/// Coefficients running past this magnitude mean the likelihood has no
/// interior maximum (complete or quasi-complete separation). Kept far
/// above anything a legitimate fit produces even on tiny-variance
/// predictors; clean separation is usually caught earlier by the
/// zero-deviance check below.
const DIVERGENCE_BOUND: f64 = 1e6;

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn log_likelihood(y: &[f64], eta: &[f64]) -> f64 {
    // y*eta - ln(1 + e^eta), computed in the numerically safe branch form
    y.iter()
        .zip(eta)
        .map(|(&yi, &e)| {
            let log1pe = if e > 0.0 {
                e + (-e).exp().ln_1p()
            } else {
                e.exp().ln_1p()
            };
            yi * e - log1pe
        })
        .sum()
}

/// Maximum-likelihood logistic fit. The response must be 0/1 with both
/// classes present; detected complete separation is an error, never a
/// silently reported coefficient.
pub fn logit_fit(sample: &AlignedSample) -> Result<RegressionReport, EconError> {
    let n = sample.response.len();
    let k = sample.predictors.len() + 1;
    if n <= k {
        return Err(EconError::TooFewRows { got: n, need: k + 1 });
    }
    if sample
        .response
        .iter()
        .any(|&y| y != 0.0 && y != 1.0)
    {
        return Err(EconError::NonBinaryResponse);
    }
    let ones = sample.response.iter().filter(|&&y| y == 1.0).count();
    if ones == 0 || ones == n {
        return Err(EconError::SingleClassResponse);
    }

    let x = |i: usize, j: usize| -> f64 {
        if j == 0 {
            1.0
        } else {
            sample.predictors[j - 1][i]
        }
    };

    let mut beta = vec![0.0; k];
    let mut eta = vec![0.0; n];
    let mut loglik = log_likelihood(&sample.response, &eta);
    let mut converged = false;
    let mut iterations = 0;

    for iter in 1..=MAX_ITERATIONS {
        iterations = iter;
        // score g = X'(y - p), information H = X' W X with W = p(1-p)
        let probs: Vec<f64> = eta.iter().map(|&e| sigmoid(e)).collect();
        let mut score = vec![0.0; k];
        let mut info = vec![vec![0.0; k]; k];
        for i in 0..n {
            let w = probs[i] * (1.0 - probs[i]);
            let resid = sample.response[i] - probs[i];
            for a in 0..k {
                score[a] += x(i, a) * resid;
                for b in 0..k {
                    info[a][b] += x(i, a) * w * x(i, b);
                }
            }
        }
        let step = linalg::solve(&info, &score).ok_or(EconError::CompleteSeparation)?;
        for (b, s) in beta.iter_mut().zip(&step) {
            *b += s;
        }
        if beta.iter().any(|b| b.abs() > DIVERGENCE_BOUND) {
            return Err(EconError::CompleteSeparation);
        }
        for (i, e) in eta.iter_mut().enumerate() {
            *e = (0..k).map(|j| beta[j] * x(i, j)).sum();
        }
        let new_loglik = log_likelihood(&sample.response, &eta);
        if (new_loglik - loglik).abs() < LOGLIK_TOLERANCE {
            loglik = new_loglik;
            converged = true;
            break;
        }
        loglik = new_loglik;
    }

    // A log-likelihood at (numerical) zero means every observation is
    // fitted perfectly; the likelihood has no interior maximum and the
    // coefficients are running off to infinity however slowly.
    if loglik > -1e-6 {
        return Err(EconError::CompleteSeparation);
    }

    // Score vector at the reported solution.
    let probs: Vec<f64> = eta.iter().map(|&e| sigmoid(e)).collect();
    let mut score = vec![0.0; k];
    let mut info = vec![vec![0.0; k]; k];
    for i in 0..n {
        let w = probs[i] * (1.0 - probs[i]);
        for a in 0..k {
            score[a] += x(i, a) * (sample.response[i] - probs[i]);
            for b in 0..k {
                info[a][b] += x(i, a) * w * x(i, b);
            }
        }
    }
    let score_norm = score.iter().map(|s| s * s).sum::<f64>().sqrt();
    let info_inv = linalg::invert(&info).ok_or(EconError::CompleteSeparation)?;

    let p_mean = ones as f64 / n as f64;
    let null_loglik = n as f64 * (p_mean * p_mean.ln() + (1.0 - p_mean) * (1.0 - p_mean).ln());
    let pseudo_r2 = 1.0 - loglik / null_loglik;

    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let mut coefficients = Vec::with_capacity(k);
    for j in 0..k {
        let estimate = beta[j];
        let std_error = info_inv[j][j].max(0.0).sqrt();
        let p_value = if std_error > 0.0 {
            2.0 * (1.0 - normal.cdf((estimate / std_error).abs()))
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
        model: ModelKind::Logit,
        coefficients,
        n_obs: n,
        fit: FitStatistic::McFaddenPseudoRSquared(pseudo_r2),
        lag_days: sample.lag_days,
        logit: Some(LogitDiagnostics {
            converged,
            iterations,
            score_norm,
        }),
    })
}
