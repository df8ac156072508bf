//! Conjugate normal location model used as an exact oracle.
//!
//! Data are `n` i.i.d. `N(theta, obs_noise_var)` draws summarised by their
//! mean, so `s(theta) = theta`, `A(theta) = obs_noise_var`, `a_n = sqrt(n)`
//! and `Ds = 1`. Every posterior quantity has a closed form.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{Model, Prior, SummaryVec};
use crate::error::{AbcError, Result};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianOracle {
    pub prior_mean: f64,
    pub prior_var: f64,
    pub obs_noise_var: f64,
    pub n: usize,
    /// Draw the sample mean directly from `N(theta, obs_noise_var / n)`
    /// rather than averaging `n` simulated points. Same law, O(1) cost.
    pub sufficient_summary: bool,
    prior: Prior,
}

impl GaussianOracle {
    pub fn new(prior_mean: f64, prior_var: f64, obs_noise_var: f64, n: usize) -> Result<Self> {
        if !(obs_noise_var > 0.0 && obs_noise_var.is_finite()) {
            return Err(AbcError::InvalidParameter(
                "observation noise variance must be positive".into(),
            ));
        }
        if n == 0 {
            return Err(AbcError::InvalidParameter(
                "sample size must be positive".into(),
            ));
        }
        let prior = Prior::gaussian(vec![prior_mean], vec![prior_var])?;
        Ok(GaussianOracle {
            prior_mean,
            prior_var,
            obs_noise_var,
            n,
            sufficient_summary: true,
            prior,
        })
    }

    pub fn with_sample_size(&self, n: usize) -> Self {
        GaussianOracle { n, ..self.clone() }
    }

    /// Summary-statistic variance `A / a_n^2`.
    pub fn summary_var(&self) -> f64 {
        self.obs_noise_var / self.n as f64
    }

    pub fn summary_rate(&self) -> f64 {
        (self.n as f64).sqrt()
    }

    /// `I(theta_0) = Ds^T A^{-1} Ds`.
    pub fn information(&self) -> f64 {
        1.0 / self.obs_noise_var
    }

    /// `beta_0 = I^{-1} Ds^T A^{-1}`, the small-bandwidth limit of the
    /// regression coefficient.
    pub fn local_coefficient(&self) -> f64 {
        self.information().recip() / self.obs_noise_var
    }

    /// Population regression coefficient of `theta` on `s` under the ABC
    /// joint posterior with a Gaussian kernel. `theta | s` is unaffected by
    /// the kernel tilt, so this equals the prior-predictive slope for any
    /// bandwidth.
    pub fn population_coefficient(&self) -> f64 {
        self.prior_var / (self.prior_var + self.summary_var())
    }

    /// Exact posterior `(mean, variance)` of `theta` given the summary.
    pub fn true_posterior(&self, s_obs: f64) -> (f64, f64) {
        self.posterior_with_summary_var(s_obs, self.summary_var())
    }

    /// ABC posterior `(mean, variance)` under a Gaussian kernel with
    /// bandwidth `epsilon`: the kernel convolves the likelihood, adding
    /// `epsilon^2` to the summary variance.
    pub fn abc_posterior(&self, s_obs: f64, epsilon: f64) -> Result<(f64, f64)> {
        if !(epsilon >= 0.0) {
            return Err(AbcError::Domain {
                what: "bandwidth",
                value: epsilon,
            });
        }
        Ok(self.posterior_with_summary_var(s_obs, self.summary_var() + epsilon * epsilon))
    }

    fn posterior_with_summary_var(&self, s_obs: f64, lik_var: f64) -> (f64, f64) {
        let precision = 1.0 / self.prior_var + 1.0 / lik_var;
        let var = 1.0 / precision;
        let mean = var * (self.prior_mean / self.prior_var + s_obs / lik_var);
        (mean, var)
    }
}

/// `n` i.i.d. `N(theta, obs_noise_var)` draws.
pub fn gaussian_sample(oracle: &GaussianOracle, theta: f64, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    let sd = oracle.obs_noise_var.sqrt();
    (0..oracle.n)
        .map(|_| theta + sd * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

impl Model for GaussianOracle {
    fn name(&self) -> &'static str {
        "gaussian"
    }
    fn param_dim(&self) -> usize {
        1
    }
    fn summary_dim(&self) -> usize {
        1
    }
    fn sample_size(&self) -> usize {
        self.n
    }
    fn prior(&self) -> &Prior {
        &self.prior
    }
    fn is_valid(&self, theta: &[f64]) -> bool {
        theta.len() == 1 && theta[0].is_finite()
    }
    fn simulate(&self, theta: &[f64], seed: u64) -> Result<Vec<f64>> {
        match *theta {
            [t] if t.is_finite() => Ok(gaussian_sample(self, t, seed)),
            _ => Err(AbcError::Dimension {
                context: "gaussian oracle parameter",
                expected: 1,
                got: theta.len(),
            }),
        }
    }
    fn summarize(&self, data: &[f64]) -> Result<SummaryVec> {
        if data.is_empty() {
            return Err(AbcError::Empty("dataset"));
        }
        SummaryVec::new(vec![data.iter().sum::<f64>() / data.len() as f64])
    }
    fn simulate_summary(&self, theta: &[f64], seed: u64) -> Result<SummaryVec> {
        if !self.sufficient_summary {
            let data = self.simulate(theta, seed)?;
            return self.summarize(&data);
        }
        let t = match *theta {
            [t] if t.is_finite() => t,
            _ => {
                return Err(AbcError::Dimension {
                    context: "gaussian oracle parameter",
                    expected: 1,
                    got: theta.len(),
                })
            }
        };
        let mut rng = rng_from_seed(seed);
        let z: f64 = rng.sample(StandardNormal);
        Ok(SummaryVec::from_vec_unchecked(vec![
            t + self.summary_var().sqrt() * z,
        ]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal;

    fn oracle() -> GaussianOracle {
        GaussianOracle::new(0.0, 1.0, 1.0, 100).unwrap()
    }

    #[test]
    fn constant_dataset_summary() {
        let s = oracle().summarize(&[2.5; 10]).unwrap();
        assert_eq!(&*s, &[2.5]);
    }

    #[test]
    fn large_sample_mean() {
        let o = GaussianOracle::new(0.0, 1.0, 1.0, 1_000_000).unwrap();
        let s = o.summarize(&gaussian_sample(&o, 0.0, 1)).unwrap();
        assert!(s[0].abs() < 0.004);
    }

    #[test]
    fn deterministic() {
        let o = oracle();
        assert_eq!(gaussian_sample(&o, 0.3, 8), gaussian_sample(&o, 0.3, 8));
        assert_eq!(
            o.simulate_summary(&[0.3], 8).unwrap(),
            o.simulate_summary(&[0.3], 8).unwrap()
        );
    }

    #[test]
    fn conjugate_posterior() {
        let (m, v) = oracle().true_posterior(0.5);
        assert!((v - 1.0 / 101.0).abs() < 1e-15);
        assert!((m - 0.5 * 100.0 / 101.0).abs() < 1e-15);
    }

    #[test]
    fn flat_prior_limit() {
        let o = GaussianOracle::new(0.0, 1e12, 2.0, 50).unwrap();
        let (_, v) = o.true_posterior(1.0);
        assert!((v - 2.0 / 50.0).abs() < 1e-10);
    }

    #[test]
    fn posterior_matches_grid_quadrature() {
        let o = GaussianOracle::new(0.3, 2.0, 1.5, 40).unwrap();
        let s_obs = 0.7;
        let tau = o.summary_var().sqrt();
        let h = 1e-4;
        let (mut z, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for i in -100_000..100_000 {
            let t = s_obs + i as f64 * h;
            let w = o.prior().density(&[t]) * normal::pdf((s_obs - t) / tau) / tau;
            z += w;
            m1 += w * t;
            m2 += w * t * t;
        }
        let mean = m1 / z;
        let var = m2 / z - mean * mean;
        let (em, ev) = o.true_posterior(s_obs);
        assert!(((mean - em) / em).abs() < 1e-8);
        assert!(((var - ev) / ev).abs() < 1e-8);
    }

    #[test]
    fn abc_posterior_values() {
        let o = oracle();
        assert_eq!(o.abc_posterior(0.5, 0.0).unwrap(), o.true_posterior(0.5));
        let (_, v) = o.abc_posterior(0.5, 0.1).unwrap();
        assert!((v - 1.0 / 51.0).abs() < 1e-15);
        let (_, v) = o.abc_posterior(0.5, 0.3).unwrap();
        assert!((v - 1.0 / 11.0).abs() < 1e-15);
        assert!(o.abc_posterior(0.5, -1.0).is_err());
    }

    #[test]
    fn limit_quantities() {
        let o = oracle();
        assert_eq!(o.local_coefficient(), 1.0);
        assert_eq!(o.information(), 1.0);
        assert!((o.population_coefficient() - 100.0 / 101.0).abs() < 1e-15);
        assert_eq!(o.summary_rate(), 10.0);
    }
}
