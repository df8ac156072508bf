//! Accuracy as a function of the accepted proportion, and the largest
//! proportion that still reaches a target accuracy.
//!
//! One simulation pool per inner replicate is drawn once and re-thresholded
//! at every proportion in the grid.

use std::fmt;
use std::str::FromStr;

use crate::asymptotics::gold::GoldStandard;
use crate::asymptotics::median;
use crate::asymptotics::metrics::re_metrics;
use crate::error::{AbcError, Result};
use crate::kernels::{bandwidth_from_proportion, KernelFamily, KernelSpec, Scaling};
use crate::regression::{regression_adjust, RegressionOptions};
use crate::samplers::{posterior_estimates, AcceptanceMode, SimulationPool};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Raw,
    Adjusted,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Raw => "raw",
            Method::Adjusted => "adjusted",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TargetMetric {
    Mu,
    Sigma,
}

impl TargetMetric {
    pub fn as_str(self) -> &'static str {
        match self {
            TargetMetric::Mu => "RE_mu",
            TargetMetric::Sigma => "RE_sigma",
        }
    }
}

impl FromStr for TargetMetric {
    type Err = AbcError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "re_mu" | "mu" | "mean" => Ok(TargetMetric::Mu),
            "re_sigma" | "sigma" | "sd" => Ok(TargetMetric::Sigma),
            _ => Err(AbcError::Config(format!("unknown target metric '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target {
    pub metric: TargetMetric,
    pub value: f64,
}

/// Median relative errors over the inner replicates at one proportion.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub q: f64,
    /// Median realised acceptance rate.
    pub p_acc: f64,
    pub raw: (f64, f64),
    pub adjusted: (f64, f64),
}

impl CurvePoint {
    /// `(RE_mu, RE_sigma)` for a method.
    pub fn errors(&self, method: Method) -> (f64, f64) {
        match method {
            Method::Raw => self.raw,
            Method::Adjusted => self.adjusted,
        }
    }

    pub fn error(&self, method: Method, metric: TargetMetric) -> f64 {
        let (mu, sigma) = self.errors(method);
        match metric {
            TargetMetric::Mu => mu,
            TargetMetric::Sigma => sigma,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcceptanceCurve {
    /// In the order of the grid, largest proportion first.
    pub points: Vec<CurvePoint>,
}

impl AcceptanceCurve {
    /// Largest proportion whose median error meets the target, `None` when
    /// no proportion does.
    pub fn required(&self, method: Method, target: Target) -> Option<&CurvePoint> {
        self.points
            .iter()
            .find(|pt| pt.error(method, target.metric) <= target.value)
    }
}

/// 16 log-spaced proportions from 0.5 down to 5e-4.
pub fn default_q_grid() -> Vec<f64> {
    let (hi, lo, k) = (0.5f64, 5e-4f64, 16);
    (0..k)
        .map(|i| (hi.ln() + (lo.ln() - hi.ln()) * i as f64 / (k - 1) as f64).exp())
        .collect()
}

fn check_grid(q_grid: &[f64]) -> Result<()> {
    if q_grid.is_empty() {
        return Err(AbcError::Empty("proportion grid"));
    }
    if q_grid.iter().any(|&q| !(q > 0.0 && q <= 1.0)) {
        return Err(AbcError::InvalidParameter(
            "proportions must lie in (0, 1]".into(),
        ));
    }
    if q_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(AbcError::InvalidParameter(
            "proportion grid must be strictly decreasing".into(),
        ));
    }
    Ok(())
}

/// Relative errors of raw and adjusted estimates at every proportion of
/// `q_grid`, with medians taken across `pools`.
///
/// A method whose estimates cannot be formed at some proportion (too few
/// accepted draws for the regression) scores an infinite error there.
pub fn acceptance_curve(
    pools: &[SimulationPool],
    s_obs: &[f64],
    scaling: &Scaling,
    q_grid: &[f64],
    reference: &GoldStandard,
    regression: &RegressionOptions,
) -> Result<AcceptanceCurve> {
    check_grid(q_grid)?;
    if pools.is_empty() {
        return Err(AbcError::Empty("simulation pools"));
    }
    let mut per_pool: Vec<Vec<[f64; 5]>> = Vec::with_capacity(pools.len());
    for pool in pools {
        let distances = pool.distances(scaling, s_obs)?;
        let mut rows = Vec::with_capacity(q_grid.len());
        for &q in q_grid {
            let eps = bandwidth_from_proportion(&distances, q)?;
            if !eps.is_finite() {
                rows.push([
                    0.0,
                    f64::INFINITY,
                    f64::INFINITY,
                    f64::INFINITY,
                    f64::INFINITY,
                ]);
                continue;
            }
            let kernel = KernelSpec::new(
                KernelFamily::Uniform,
                scaling.clone(),
                eps.max(f64::MIN_POSITIVE),
            )?;
            let run = pool.accept_with_distances(&distances, &kernel, AcceptanceMode::Threshold);
            let raw = posterior_estimates(&run, true)
                .and_then(|m| re_metrics(&m.mean, &m.sd(), &reference.mean, &reference.sd))
                .unwrap_or((f64::INFINITY, f64::INFINITY));
            let adj = regression_adjust(&run, s_obs, regression)
                .and_then(|a| a.estimates(regression.use_weights))
                .and_then(|m| re_metrics(&m.mean, &m.sd(), &reference.mean, &reference.sd))
                .unwrap_or((f64::INFINITY, f64::INFINITY));
            rows.push([run.p_acc_hat, raw.0, raw.1, adj.0, adj.1]);
        }
        per_pool.push(rows);
    }
    let points = q_grid
        .iter()
        .enumerate()
        .map(|(j, &q)| {
            let col = |c: usize| median(&mut per_pool.iter().map(|r| r[j][c]).collect::<Vec<_>>());
            CurvePoint {
                q,
                p_acc: col(0),
                raw: (col(1), col(2)),
                adjusted: (col(3), col(4)),
            }
        })
        .collect();
    Ok(AcceptanceCurve { points })
}

/// Largest proportion in `q_grid` whose median error meets `target`.
pub fn required_acceptance_rate(
    pools: &[SimulationPool],
    s_obs: &[f64],
    scaling: &Scaling,
    q_grid: &[f64],
    reference: &GoldStandard,
    method: Method,
    target: Target,
) -> Result<Option<f64>> {
    let curve = acceptance_curve(
        pools,
        s_obs,
        scaling,
        q_grid,
        reference,
        &RegressionOptions::default(),
    )?;
    Ok(curve.required(method, target).map(|pt| pt.q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{gaussian_sample, GaussianOracle, Model};
    use crate::samplers::ProposalSpec;
    use nalgebra::DMatrix;

    fn setup() -> (Vec<SimulationPool>, Vec<f64>, GoldStandard) {
        let oracle = GaussianOracle::new(0.0, 1.0, 1.0, 100).unwrap();
        let data = gaussian_sample(&oracle, 0.5, 4);
        let s_obs = oracle.summarize(&data).unwrap().into_inner();
        let (mean, var) = oracle.true_posterior(s_obs[0]);
        let gold = GoldStandard {
            mean: vec![mean],
            sd: vec![var.sqrt()],
            cov: DMatrix::from_element(1, 1, var),
            n_accepted: 0,
            epsilon: 0.0,
        };
        let pools = (0..5)
            .map(|r| {
                SimulationPool::simulate(&oracle, &ProposalSpec::Prior, 40_000, 100 + r).unwrap()
            })
            .collect();
        (pools, s_obs, gold)
    }

    #[test]
    fn grid_shape() {
        let g = default_q_grid();
        assert_eq!(g.len(), 16);
        assert!((g[0] - 0.5).abs() < 1e-15 && (g[15] - 5e-4).abs() < 1e-15);
        assert!(check_grid(&g).is_ok());
        assert!(check_grid(&[0.1, 0.2]).is_err());
    }

    #[test]
    fn infinite_target_and_unreachable_target() {
        let (pools, s_obs, gold) = setup();
        let g = default_q_grid();
        let inf = Target {
            metric: TargetMetric::Mu,
            value: f64::INFINITY,
        };
        let r = required_acceptance_rate(
            &pools,
            &s_obs,
            &Scaling::Identity,
            &g,
            &gold,
            Method::Raw,
            inf,
        )
        .unwrap();
        assert_eq!(r, Some(0.5));
        let never = Target {
            metric: TargetMetric::Sigma,
            value: -1.0,
        };
        let r = required_acceptance_rate(
            &pools,
            &s_obs,
            &Scaling::Identity,
            &g,
            &gold,
            Method::Adjusted,
            never,
        )
        .unwrap();
        assert_eq!(r, None);
    }

    #[test]
    fn adjustment_needs_no_smaller_proportion() {
        let (pools, s_obs, gold) = setup();
        let g = default_q_grid();
        let target = Target {
            metric: TargetMetric::Sigma,
            value: 0.1,
        };
        let curve = acceptance_curve(
            &pools,
            &s_obs,
            &Scaling::Identity,
            &g,
            &gold,
            &RegressionOptions::default(),
        )
        .unwrap();
        let raw = curve.required(Method::Raw, target).map_or(0.0, |p| p.q);
        let adj = curve
            .required(Method::Adjusted, target)
            .map_or(0.0, |p| p.q);
        assert!(adj > 0.0 && adj >= raw, "raw {raw} adjusted {adj}");
    }
}
