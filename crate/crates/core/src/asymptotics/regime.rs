//! Acceptance rates along a sequence of sample sizes with a bandwidth and a
//! proposal scale that shrink at prescribed rates.

use nalgebra::DMatrix;

use crate::asymptotics::gold::{gold_standard, GoldProtocol};
use crate::error::{AbcError, Result};
use crate::kernels::{KernelFamily, KernelSpec, Scaling};
use crate::models::{Model, ModelSpec};
use crate::rng::{derive_labeled, derive_seed};
use crate::samplers::{
    estimate_pacc, posterior_estimates, run_rejection, AcceptanceMode, GaussianProposal,
    ProposalSpec,
};

/// Limit of `a_n * eps_n` as `n` grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsClass {
    Zero,
    Finite,
    Infinite,
}

impl EpsClass {
    pub fn as_str(self) -> &'static str {
        match self {
            EpsClass::Zero => "zero",
            EpsClass::Finite => "finite",
            EpsClass::Infinite => "infinite",
        }
    }
}

/// Summary rate `a_n = n^summary_rate_exponent` and `eps_n = eps_scale * n^(-eps_rate)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeSpec {
    pub summary_rate_exponent: f64,
    pub eps_scale: f64,
    pub eps_rate: f64,
}

impl RegimeSpec {
    /// Root-n summaries.
    pub fn root_n(eps_scale: f64, eps_rate: f64) -> Self {
        RegimeSpec {
            summary_rate_exponent: 0.5,
            eps_scale,
            eps_rate,
        }
    }

    pub fn epsilon(&self, n: usize) -> f64 {
        self.eps_scale * (n as f64).powf(-self.eps_rate)
    }

    pub fn summary_rate(&self, n: usize) -> f64 {
        (n as f64).powf(self.summary_rate_exponent)
    }

    pub fn eps_class(&self) -> EpsClass {
        let gap = self.eps_rate - self.summary_rate_exponent;
        if gap.abs() < 1e-12 {
            EpsClass::Finite
        } else if gap > 0.0 {
            EpsClass::Zero
        } else {
            EpsClass::Infinite
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CenterRule {
    /// Mean of a reference posterior computed for each dataset.
    Gold(GoldProtocol),
    Fixed(Vec<f64>),
}

/// Normal proposal `center + sigma_n X` with `sigma_n = sigma_ratio * eps_n`
/// and `X ~ N(0, I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProposalRule {
    pub sigma_ratio: f64,
    pub center: CenterRule,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSettings {
    pub n_grid: Vec<usize>,
    pub proposals: usize,
    pub kernel: KernelFamily,
    pub proposal: ProposalRule,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimePoint {
    pub n: usize,
    pub epsilon: f64,
    pub sigma: f64,
    pub s_obs: Vec<f64>,
    pub center: Vec<f64>,
    pub p_acc: f64,
    pub se: f64,
    pub n_accepted: usize,
    /// Weighted posterior mean and sd; `NaN` when nothing was accepted.
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
    pub seed: u64,
}

/// For each `n`: simulate a dataset at `theta0`, build the bandwidth and the
/// proposal, and run the Bernoulli sampler.
pub fn regime_sweep(
    model: &ModelSpec,
    theta0: &[f64],
    regime: &RegimeSpec,
    settings: &SweepSettings,
    seed: u64,
) -> Result<Vec<RegimePoint>> {
    if settings.n_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(AbcError::InvalidParameter(
            "sample-size grid must be increasing".into(),
        ));
    }
    if !(settings.proposal.sigma_ratio > 0.0) {
        return Err(AbcError::Domain {
            what: "proposal scale ratio (must be > 0)",
            value: settings.proposal.sigma_ratio,
        });
    }
    let p = model.param_dim();
    let mut out = Vec::with_capacity(settings.n_grid.len());
    for (j, &n) in settings.n_grid.iter().enumerate() {
        let m = model.with_sample_size(n);
        let point_seed = derive_seed(seed, j as u64);
        let data = m.simulate(theta0, derive_labeled(point_seed, "data"))?;
        let s_obs = m.summarize(&data)?.into_inner();
        let center = match &settings.proposal.center {
            CenterRule::Fixed(c) => c.clone(),
            CenterRule::Gold(protocol) => {
                gold_standard(
                    &m,
                    &data,
                    protocol,
                    derive_labeled(point_seed, "gold"),
                    None,
                )?
                .mean
            }
        };
        let epsilon = regime.epsilon(n);
        let sigma = settings.proposal.sigma_ratio * epsilon;
        let proposal = ProposalSpec::Gaussian(GaussianProposal::new(
            center.clone(),
            sigma,
            DMatrix::identity(p, p),
        )?);
        let kernel = KernelSpec::new(settings.kernel, Scaling::Identity, epsilon)?;
        let run_seed = derive_labeled(point_seed, "sampler");
        let run = run_rejection(
            &m,
            &s_obs,
            &kernel,
            &proposal,
            settings.proposals,
            AcceptanceMode::Bernoulli,
            run_seed,
        )?;
        let (p_acc, se) = estimate_pacc(&run);
        let (mean, sd) = match posterior_estimates(&run, true) {
            Ok(mo) => {
                let sd = mo.sd();
                (mo.mean, sd)
            }
            Err(_) => (vec![f64::NAN; p], vec![f64::NAN; p]),
        };
        out.push(RegimePoint {
            n,
            epsilon,
            sigma,
            s_obs,
            center,
            p_acc,
            se,
            n_accepted: run.n_accepted(),
            mean,
            sd,
            seed: run_seed,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::GaussianOracle;

    #[test]
    fn class_labels() {
        assert_eq!(RegimeSpec::root_n(1.0, 0.75).eps_class(), EpsClass::Zero);
        assert_eq!(RegimeSpec::root_n(1.0, 0.5).eps_class(), EpsClass::Finite);
        assert_eq!(RegimeSpec::root_n(1.0, 0.4).eps_class(), EpsClass::Infinite);
        let r = RegimeSpec::root_n(2.0, 0.5);
        assert!((r.epsilon(100) - 0.2).abs() < 1e-15);
        assert!((r.summary_rate(100) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn fixed_seed_reproduces() {
        let model = ModelSpec::Gaussian(GaussianOracle::new(0.0, 1.0, 1.0, 100).unwrap());
        let settings = SweepSettings {
            n_grid: vec![100, 1000],
            proposals: 5_000,
            kernel: KernelFamily::Uniform,
            proposal: ProposalRule {
                sigma_ratio: 0.3,
                center: CenterRule::Fixed(vec![0.0]),
            },
        };
        let regime = RegimeSpec::root_n(1.0, 0.4);
        let a = regime_sweep(&model, &[0.0], &regime, &settings, 5).unwrap();
        let b = regime_sweep(&model, &[0.0], &regime, &settings, 5).unwrap();
        assert_eq!(a, b);
        assert!(regime_sweep(
            &model,
            &[0.0],
            &regime,
            &SweepSettings {
                n_grid: vec![10, 5],
                ..settings
            },
            5
        )
        .is_err());
    }
}
