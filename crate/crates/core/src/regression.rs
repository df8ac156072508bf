//! Local-linear regression adjustment of accepted ABC draws.
//!
//! Fits `theta_i = alpha + beta (s_i - s_obs) + e_i` by (weighted) least
//! squares and replaces each draw by `theta_i - beta_hat (s_i - s_obs)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{AbcError, Result};
use crate::kernels::{KernelFamily, KernelSpec, Scaling};
use crate::models::GaussianOracle;
use crate::rng::derive_seed;
use crate::samplers::{sample_accepted, weighted_moments, AbcDraw, AbcRun, Moments, ProposalSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionOptions {
    /// Weight the fit by the importance weights.
    pub use_weights: bool,
    /// Additionally weight by the kernel value (Beaumont-style). Off by default.
    pub kernel_weighted: bool,
    /// Ridge added to the standardised Gram matrix, relative to its mean
    /// eigenvalue, when that matrix is numerically singular.
    pub ridge: f64,
    /// Condition number above which the ridge is applied.
    pub max_condition: f64,
}

impl Default for RegressionOptions {
    fn default() -> Self {
        RegressionOptions {
            use_weights: true,
            kernel_weighted: false,
            ridge: 1e-8,
            max_condition: 1e12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionFit {
    pub alpha_hat: Vec<f64>,
    /// `p x d`.
    pub beta_hat: DMatrix<f64>,
    /// Condition number of the standardised Gram matrix (before any ridge).
    pub gram_condition: f64,
    /// Ridge actually applied, 0 when none was needed.
    pub ridge_applied: f64,
    pub n_used: usize,
}

impl RegressionFit {
    fn apply(&self, theta: &[f64], s: &[f64], s_obs: &[f64]) -> Vec<f64> {
        let (p, d) = self.beta_hat.shape();
        (0..p)
            .map(|a| {
                let shift: f64 = (0..d)
                    .map(|k| self.beta_hat[(a, k)] * (s[k] - s_obs[k]))
                    .sum();
                theta[a] - shift
            })
            .collect()
    }
}

/// Regression-adjusted draws with the weights they carried.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjustedRun {
    pub theta_star: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// Pool index of each source draw.
    pub source_indices: Vec<usize>,
    pub fit: RegressionFit,
}

impl AdjustedRun {
    pub fn estimates(&self, use_weights: bool) -> Result<Moments> {
        if use_weights {
            weighted_moments(&self.theta_star, Some(&self.weights))
        } else {
            weighted_moments(&self.theta_star, None)
        }
    }
}

fn fit_weights(draws: &[AbcDraw], options: &RegressionOptions) -> Vec<f64> {
    draws
        .iter()
        .map(|d| {
            let w = if options.use_weights { d.weight } else { 1.0 };
            if options.kernel_weighted {
                w * d.kernel_value
            } else {
                w
            }
        })
        .collect()
}

/// Least-squares fit of `theta` on `(1, s - s_obs)`.
pub fn fit_linear(
    draws: &[AbcDraw],
    s_obs: &[f64],
    options: &RegressionOptions,
) -> Result<RegressionFit> {
    let d = s_obs.len();
    let m = draws.len();
    if m < d + 2 {
        return Err(AbcError::InsufficientSample {
            needed: d + 2,
            have: m,
        });
    }
    let p = draws[0].theta.len();
    for dr in draws {
        if dr.s.len() != d {
            return Err(AbcError::Dimension {
                context: "summary of accepted draw",
                expected: d,
                got: dr.s.len(),
            });
        }
    }
    let w = fit_weights(draws, options);
    let total: f64 = w.iter().sum();
    if !(total > 0.0) {
        return Err(AbcError::InvalidParameter(
            "regression weights sum to zero".into(),
        ));
    }

    let mut x_bar = DVector::<f64>::zeros(d);
    let mut t_bar = DVector::<f64>::zeros(p);
    for (dr, &wi) in draws.iter().zip(&w) {
        for k in 0..d {
            x_bar[k] += wi * (dr.s[k] - s_obs[k]);
        }
        for a in 0..p {
            t_bar[a] += wi * dr.theta[a];
        }
    }
    x_bar /= total;
    t_bar /= total;

    let mut sxx = DMatrix::<f64>::zeros(d, d);
    let mut sxt = DMatrix::<f64>::zeros(d, p);
    let mut xc = vec![0.0; d];
    for (dr, &wi) in draws.iter().zip(&w) {
        if wi == 0.0 {
            continue;
        }
        for k in 0..d {
            xc[k] = dr.s[k] - s_obs[k] - x_bar[k];
        }
        for i in 0..d {
            let wx = wi * xc[i];
            for j in i..d {
                sxx[(i, j)] += wx * xc[j];
            }
            for a in 0..p {
                sxt[(i, a)] += wx * (dr.theta[a] - t_bar[a]);
            }
        }
    }
    for i in 0..d {
        for j in 0..i {
            sxx[(i, j)] = sxx[(j, i)];
        }
    }

    // Standardise so the conditioning check and the ridge are scale free.
    let scale: Vec<f64> = (0..d)
        .map(|k| {
            let v = sxx[(k, k)];
            if v > 0.0 {
                v.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    let mut gram = sxx.clone();
    let mut rhs = sxt.clone();
    for i in 0..d {
        for j in 0..d {
            gram[(i, j)] /= scale[i] * scale[j];
        }
        for a in 0..p {
            rhs[(i, a)] /= scale[i];
        }
    }
    let eig = SymmetricEigen::new(gram.clone());
    let max_eig = eig.eigenvalues.max();
    let min_eig = eig.eigenvalues.min();
    let gram_condition = if min_eig > 0.0 {
        max_eig / min_eig
    } else {
        f64::INFINITY
    };

    let mut ridge_applied = 0.0;
    if !(gram_condition <= options.max_condition) {
        ridge_applied = options.ridge * gram.trace() / d as f64;
        if !(ridge_applied > 0.0) {
            ridge_applied = options.ridge;
        }
        for i in 0..d {
            gram[(i, i)] += ridge_applied;
        }
    }
    let chol = gram
        .cholesky()
        .ok_or(AbcError::NotPositiveDefinite("regression Gram matrix"))?;
    let mut coef = chol.solve(&rhs); // d x p, standardised
    for i in 0..d {
        for a in 0..p {
            coef[(i, a)] /= scale[i];
        }
    }
    let beta_hat = coef.transpose();
    let alpha = &t_bar - &beta_hat * &x_bar;
    Ok(RegressionFit {
        alpha_hat: alpha.iter().copied().collect(),
        beta_hat,
        gram_condition,
        ridge_applied,
        n_used: m,
    })
}

/// `theta*_i = theta_i - beta_hat (s_i - s_obs)`, weights unchanged.
pub fn adjust(run: &AbcRun, fit: &RegressionFit, s_obs: &[f64]) -> Result<AdjustedRun> {
    let (p, d) = fit.beta_hat.shape();
    if d != s_obs.len() {
        return Err(AbcError::Dimension {
            context: "regression fit vs observed summary",
            expected: d,
            got: s_obs.len(),
        });
    }
    let mut theta_star = Vec::with_capacity(run.draws.len());
    for dr in &run.draws {
        if dr.theta.len() != p || dr.s.len() != d {
            return Err(AbcError::Dimension {
                context: "regression fit vs draw",
                expected: p,
                got: dr.theta.len(),
            });
        }
        theta_star.push(fit.apply(&dr.theta, &dr.s, s_obs));
    }
    Ok(AdjustedRun {
        theta_star,
        weights: run.weights(),
        source_indices: run.draws.iter().map(|d| d.index).collect(),
        fit: fit.clone(),
    })
}

/// Fit and adjust in one step.
pub fn regression_adjust(
    run: &AbcRun,
    s_obs: &[f64],
    options: &RegressionOptions,
) -> Result<AdjustedRun> {
    let fit = fit_linear(&run.draws, s_obs, options)?;
    adjust(run, &fit, s_obs)
}

/// Monte Carlo error of `beta_hat` against a large-sample reference fit.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaErrorTable {
    pub beta_ref: f64,
    /// `(N, median error, all replicate errors)`.
    pub rows: Vec<(usize, f64, Vec<f64>)>,
}

impl BetaErrorTable {
    /// Least-squares slope of `log(median error)` on `log N`.
    pub fn log_log_slope(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .map(|(n, e, _)| ((*n as f64).ln(), e.ln()))
            .collect();
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2]
    } else {
        0.5 * (values[m / 2 - 1] + values[m / 2])
    }
}

/// `|beta_hat - beta_ref|` over `replicates` independent ABC samples of
/// each size in `sample_sizes`, using a Gaussian kernel with prior
/// proposals on the Gaussian oracle. `beta_ref` is fitted once on
/// `reference_size` accepted draws from an independent stream.
pub fn beta_error_scaling(
    oracle: &GaussianOracle,
    s_obs: f64,
    epsilon: f64,
    sample_sizes: &[usize],
    replicates: usize,
    reference_size: usize,
    seed: u64,
) -> Result<BetaErrorTable> {
    if sample_sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AbcError::InvalidParameter(
            "sample sizes must be increasing".into(),
        ));
    }
    let kernel = KernelSpec::new(KernelFamily::Gaussian, Scaling::Identity, epsilon)?;
    let options = RegressionOptions {
        use_weights: false,
        ..RegressionOptions::default()
    };
    let s_obs = [s_obs];
    let draw_cap = |target: usize| target.saturating_mul(10_000).max(1_000_000);
    let fit_beta = |target: usize, stream: u64| -> Result<f64> {
        let run = sample_accepted(
            oracle,
            &s_obs,
            &kernel,
            &ProposalSpec::Prior,
            target,
            draw_cap(target),
            stream,
        )?;
        Ok(fit_linear(&run.draws, &s_obs, &options)?.beta_hat[(0, 0)])
    };
    let beta_ref = fit_beta(reference_size, derive_seed(seed, u64::MAX))?;
    let mut rows = Vec::with_capacity(sample_sizes.len());
    for (g, &size) in sample_sizes.iter().enumerate() {
        let mut errors = (0..replicates)
            .map(|r| {
                let stream = derive_seed(derive_seed(seed, g as u64), r as u64);
                Ok((fit_beta(size, stream)? - beta_ref).abs())
            })
            .collect::<Result<Vec<f64>>>()?;
        let med = median(&mut errors.clone());
        errors.shrink_to_fit();
        rows.push((size, med, errors));
    }
    Ok(BetaErrorTable { beta_ref, rows })
}
