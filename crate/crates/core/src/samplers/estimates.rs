use nalgebra::DMatrix;

use super::AbcRun;
use crate::error::{AbcError, Result};

/// Self-normalised weighted moments of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub mean: Vec<f64>,
    /// Unbiased for reliability weights; the usual `1/(m-1)` form when all
    /// weights are equal.
    pub cov: DMatrix<f64>,
    pub ess: f64,
}

impl Moments {
    pub fn sd(&self) -> Vec<f64> {
        self.cov
            .diagonal()
            .iter()
            .map(|v| v.max(0.0).sqrt())
            .collect()
    }
}

/// `(sum w)^2 / sum w^2`.
pub fn effective_sample_size(weights: &[f64]) -> f64 {
    let (s1, s2) = weights
        .iter()
        .fold((0.0, 0.0), |(a, b), w| (a + w, b + w * w));
    if s2 > 0.0 {
        s1 * s1 / s2
    } else {
        0.0
    }
}

pub fn weighted_moments(rows: &[Vec<f64>], weights: Option<&[f64]>) -> Result<Moments> {
    let m = rows.len();
    if m < 2 {
        return Err(AbcError::InsufficientSample { needed: 2, have: m });
    }
    let p = rows[0].len();
    let unit;
    let w = match weights {
        Some(w) => {
            if w.len() != m {
                return Err(AbcError::Dimension {
                    context: "weights",
                    expected: m,
                    got: w.len(),
                });
            }
            w
        }
        None => {
            unit = vec![1.0; m];
            &unit
        }
    };
    let v1: f64 = w.iter().sum();
    let v2: f64 = w.iter().map(|x| x * x).sum();
    if !(v1 > 0.0) {
        return Err(AbcError::InvalidParameter("weights sum to zero".into()));
    }
    let mut mean = vec![0.0; p];
    for (row, &wi) in rows.iter().zip(w) {
        for (acc, x) in mean.iter_mut().zip(row) {
            *acc += wi * x;
        }
    }
    mean.iter_mut().for_each(|x| *x /= v1);

    let mut cov = DMatrix::zeros(p, p);
    for (row, &wi) in rows.iter().zip(w) {
        for a in 0..p {
            let da = row[a] - mean[a];
            for b in a..p {
                cov[(a, b)] += wi * da * (row[b] - mean[b]);
            }
        }
    }
    let denom = v1 - v2 / v1;
    if !(denom > 0.0) {
        return Err(AbcError::InsufficientSample { needed: 2, have: 1 });
    }
    for a in 0..p {
        for b in a..p {
            cov[(a, b)] /= denom;
            cov[(b, a)] = cov[(a, b)];
        }
    }
    Ok(Moments {
        mean,
        cov,
        ess: v1 * v1 / v2,
    })
}

/// Weighted mean, covariance and ESS of the accepted draws.
pub fn posterior_estimates(run: &AbcRun, use_weights: bool) -> Result<Moments> {
    let rows = run.thetas();
    if use_weights {
        weighted_moments(&rows, Some(&run.weights()))
    } else {
        weighted_moments(&rows, None)
    }
}

/// Acceptance proportion and its binomial standard error.
pub fn estimate_pacc(run: &AbcRun) -> (f64, f64) {
    let n = run.n_proposed.max(1) as f64;
    let p = run.n_accepted() as f64 / n;
    (p, (p * (1.0 - p) / n).sqrt())
}
