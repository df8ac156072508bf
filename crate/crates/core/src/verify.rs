//! End-to-end checks against the Gaussian conjugate model, where the ABC
//! posterior, the adjusted posterior and their limits are known exactly.

use std::time::Instant;

use crate::asymptotics::{
    regime_sweep, shape_test, CenterRule, GoldProtocol, LimitReference, ProposalRule, RegimePoint,
    RegimeSpec, SweepSettings,
};
use crate::error::Result;
use crate::kernels::{KernelFamily, KernelSpec, Scaling, ScalingRule};
use crate::models::{gaussian_sample, GaussianOracle, Model, ModelSpec};
use crate::regression::{beta_error_scaling, regression_adjust, RegressionOptions};
use crate::rng::derive_labeled;
use crate::samplers::{run_rejection, weighted_moments, AcceptanceMode, ProposalSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// Variance of the ABC posterior at bandwidth 0.1.
    pub abc_var_rel: f64,
    pub abc_var_se: f64,
    /// Raw variance at bandwidth 0.3.
    pub raw_var_rel: f64,
    /// Adjusted variance at bandwidth 0.3.
    pub adjusted_var_rel: f64,
    pub shape_ks: f64,
    /// Required gap between neighbouring acceptance rates, in combined SEs.
    pub regime_margin_se: f64,
    /// Acceptance rate at the largest `n` must exceed this (growing regime).
    pub regime_high: f64,
    /// ... and stay below this (vanishing regime).
    pub regime_low: f64,
    pub slope_center: f64,
    pub slope_halfwidth: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            abc_var_rel: 0.03,
            abc_var_se: 3.0,
            raw_var_rel: 0.10,
            adjusted_var_rel: 0.05,
            shape_ks: 0.07,
            regime_margin_se: 3.0,
            regime_high: 0.9,
            regime_low: 0.05,
            slope_center: -0.5,
            slope_halfwidth: 0.15,
        }
    }
}

impl Tolerances {
    /// Every tolerance made `factor` times stricter.
    pub fn tightened(&self, factor: f64) -> Self {
        Tolerances {
            abc_var_rel: self.abc_var_rel / factor,
            abc_var_se: self.abc_var_se / factor,
            raw_var_rel: self.raw_var_rel / factor,
            adjusted_var_rel: self.adjusted_var_rel / factor,
            shape_ks: self.shape_ks / factor,
            regime_margin_se: self.regime_margin_se * factor,
            regime_high: 1.0 - (1.0 - self.regime_high) / factor,
            regime_low: self.regime_low / factor,
            slope_center: self.slope_center,
            slope_halfwidth: self.slope_halfwidth / factor,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    /// Named measured quantities.
    pub measured: Vec<(&'static str, f64)>,
    pub expected: String,
    pub passed: bool,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn value(&self, key: &str) -> Option<f64> {
        self.measured
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
    }

    pub fn measured_text(&self) -> String {
        self.measured
            .iter()
            .map(|(k, v)| format!("{k}={v:.6}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// `N(0, 1)` prior, 100 unit-variance observations.
pub fn reference_oracle() -> GaussianOracle {
    let mut o = GaussianOracle::new(0.0, 1.0, 1.0, 100).expect("valid oracle");
    o.sufficient_summary = false;
    o
}

fn observed(oracle: &GaussianOracle, theta0: f64, seed: u64) -> Result<Vec<f64>> {
    let data = gaussian_sample(oracle, theta0, derive_labeled(seed, "observed"));
    Ok(oracle.summarize(&data)?.into_inner())
}

fn variance_of(rows: &[Vec<f64>]) -> Result<(f64, usize)> {
    let m = weighted_moments(rows, None)?;
    Ok((m.cov[(0, 0)], rows.len()))
}

/// Accepted-sample variance with a Gaussian kernel at bandwidth 0.1.
pub fn check_abc_variance(tol: &Tolerances, seed: u64) -> Result<CriterionResult> {
    let t = Instant::now();
    let oracle = reference_oracle();
    let s_obs = observed(&oracle, 0.3, seed)?;
    let eps = 0.1;
    let kernel = KernelSpec::new(KernelFamily::Gaussian, Scaling::Identity, eps)?;
    let run = run_rejection(
        &oracle,
        &s_obs,
        &kernel,
        &ProposalSpec::Prior,
        200_000,
        AcceptanceMode::Bernoulli,
        derive_labeled(seed, "abc-variance"),
    )?
    .require_nonempty()?;
    let (var, m) = variance_of(&run.thetas())?;
    let expected = oracle.abc_posterior(s_obs[0], eps)?.1;
    let se = expected * (2.0 / (m as f64 - 1.0)).sqrt();
    let rel = (var - expected).abs() / expected;
    Ok(CriterionResult {
        id: 1,
        name: "ABC posterior variance (Gaussian kernel, eps=0.1)",
        measured: vec![
            ("variance", var),
            ("accepted", m as f64),
            ("se", se),
            ("p_acc", run.p_acc_hat),
        ],
        expected: format!(
            "{expected:.6} within {}% and {} SE",
            100.0 * tol.abc_var_rel,
            tol.abc_var_se
        ),
        passed: rel <= tol.abc_var_rel && (var - expected).abs() <= tol.abc_var_se * se,
        seconds: t.elapsed().as_secs_f64(),
    })
}

/// Raw and adjusted variances at bandwidth 0.3 from one run.
pub fn check_inflation_and_adjustment(tol: &Tolerances, seed: u64) -> Result<[CriterionResult; 2]> {
    let t = Instant::now();
    let oracle = reference_oracle();
    let s_obs = observed(&oracle, 0.3, seed)?;
    let eps = 0.3;
    let kernel = KernelSpec::new(KernelFamily::Gaussian, Scaling::Identity, eps)?;
    let run = run_rejection(
        &oracle,
        &s_obs,
        &kernel,
        &ProposalSpec::Prior,
        200_000,
        AcceptanceMode::Bernoulli,
        derive_labeled(seed, "inflation"),
    )?
    .require_nonempty()?;
    let (raw, m) = variance_of(&run.thetas())?;
    let adjusted_run = regression_adjust(&run, &s_obs, &RegressionOptions::default())?;
    let (adj, _) = variance_of(&adjusted_run.theta_star)?;
    let secs = t.elapsed().as_secs_f64();
    let raw_expected = oracle.abc_posterior(s_obs[0], eps)?.1;
    let true_var = oracle.true_posterior(s_obs[0]).1;
    let raw_rel = (raw - raw_expected).abs() / raw_expected;
    let adj_rel = (adj - true_var).abs() / true_var;
    Ok([
        CriterionResult {
            id: 2,
            name: "Unadjusted variance inflation (eps=0.3)",
            measured: vec![
                ("variance", raw),
                ("ratio_to_true", raw / true_var),
                ("accepted", m as f64),
            ],
            expected: format!("{raw_expected:.6} within {}%", 100.0 * tol.raw_var_rel),
            passed: raw_rel <= tol.raw_var_rel,
            seconds: secs,
        },
        CriterionResult {
            id: 3,
            name: "Regression-adjusted variance (eps=0.3)",
            measured: vec![
                ("variance", adj),
                ("beta_hat", adjusted_run.fit.beta_hat[(0, 0)]),
            ],
            expected: format!("{true_var:.6} within {}%", 100.0 * tol.adjusted_var_rel),
            passed: adj_rel <= tol.adjusted_var_rel,
            seconds: secs,
        },
    ])
}

/// Limit shapes at `n = 10^4`, uniform kernel, bandwidth 0.1.
pub fn check_limit_shapes(tol: &Tolerances, seed: u64) -> Result<CriterionResult> {
    let t = Instant::now();
    let oracle = GaussianOracle::new(0.0, 1.0, 1.0, 10_000)?;
    let s_obs = observed(&oracle, 0.0, seed)?;
    let eps = 0.1;
    let kernel = KernelSpec::new(KernelFamily::Uniform, Scaling::Identity, eps)?;
    let run = run_rejection(
        &oracle,
        &s_obs,
        &kernel,
        &ProposalSpec::Prior,
        100_000,
        AcceptanceMode::Bernoulli,
        derive_labeled(seed, "shape"),
    )?;
    let raw: Vec<f64> = run.draws.iter().map(|d| d.theta[0]).collect();
    let ks_raw = shape_test(
        &raw,
        None,
        &LimitReference::KernelShape {
            family: KernelFamily::Uniform,
            ds: 1.0,
        },
        1.0 / eps,
    )?;
    let adjusted = regression_adjust(&run, &s_obs, &RegressionOptions::default())?;
    let adj: Vec<f64> = adjusted.theta_star.iter().map(|t| t[0]).collect();
    let ks_adj = shape_test(
        &adj,
        None,
        &LimitReference::Normal {
            var: 1.0 / oracle.information(),
        },
        oracle.summary_rate(),
    )?;
    let m = raw.len();
    Ok(CriterionResult {
        id: 4,
        name: "Limit shapes (n=1e4, uniform kernel, eps=0.1)",
        measured: vec![
            ("ks_raw_uniform", ks_raw),
            ("ks_adjusted_normal", ks_adj),
            ("accepted", m as f64),
        ],
        expected: format!("both KS < {} with >= 5000 accepted", tol.shape_ks),
        passed: m >= 5_000 && ks_raw < tol.shape_ks && ks_adj < tol.shape_ks,
        seconds: t.elapsed().as_secs_f64(),
    })
}

/// Acceptance-rate sweep for one bandwidth rate.
pub fn acceptance_regime(eps_rate: f64, seed: u64) -> Result<Vec<RegimePoint>> {
    let model = ModelSpec::Gaussian(GaussianOracle::new(0.0, 1.0, 1.0, 100)?);
    let settings = SweepSettings {
        n_grid: vec![100, 1_000, 10_000, 100_000],
        proposals: 50_000,
        kernel: KernelFamily::Uniform,
        proposal: ProposalRule {
            sigma_ratio: 0.3,
            center: CenterRule::Gold(GoldProtocol {
                scaling: ScalingRule::Identity,
                refine_rounds: 0,
                ..GoldProtocol::default()
            }),
        },
    };
    regime_sweep(
        &model,
        &[0.3],
        &RegimeSpec::root_n(1.0, eps_rate),
        &settings,
        seed,
    )
}

fn monotone(points: &[RegimePoint], increasing: bool, margin: f64) -> bool {
    points.windows(2).all(|w| {
        let gap = if increasing {
            w[1].p_acc - w[0].p_acc
        } else {
            w[0].p_acc - w[1].p_acc
        };
        gap > margin * (w[0].se * w[0].se + w[1].se * w[1].se).sqrt()
    })
}

pub fn check_regimes(tol: &Tolerances, seed: u64) -> Result<CriterionResult> {
    let t = Instant::now();
    let grow = acceptance_regime(0.4, derive_labeled(seed, "regime-grow"))?;
    let vanish = acceptance_regime(0.75, derive_labeled(seed, "regime-vanish"))?;
    let last = |pts: &[RegimePoint]| pts.last().map_or(f64::NAN, |p| p.p_acc);
    let passed = monotone(&grow, true, tol.regime_margin_se)
        && last(&grow) > tol.regime_high
        && monotone(&vanish, false, tol.regime_margin_se)
        && last(&vanish) < tol.regime_low;
    let names = ["p_grow_1e2", "p_grow_1e3", "p_grow_1e4", "p_grow_1e5"];
    let names_v = [
        "p_vanish_1e2",
        "p_vanish_1e3",
        "p_vanish_1e4",
        "p_vanish_1e5",
    ];
    let mut measured: Vec<(&'static str, f64)> = names
        .iter()
        .copied()
        .zip(grow.iter().map(|p| p.p_acc))
        .collect();
    measured.extend(names_v.iter().copied().zip(vanish.iter().map(|p| p.p_acc)));
    Ok(CriterionResult {
        id: 5,
        name: "Acceptance-rate regimes (eps=n^-0.4 grows, eps=n^-0.75 vanishes)",
        measured,
        expected: format!(
            "increasing to > {}, decreasing to < {}, steps > {} SE",
            tol.regime_high, tol.regime_low, tol.regime_margin_se
        ),
        passed,
        seconds: t.elapsed().as_secs_f64(),
    })
}

pub fn check_beta_rate(tol: &Tolerances, seed: u64) -> Result<CriterionResult> {
    let t = Instant::now();
    let mut oracle = reference_oracle();
    oracle.sufficient_summary = true;
    let s_obs = observed(&oracle, 0.3, seed)?[0];
    let table = beta_error_scaling(
        &oracle,
        s_obs,
        0.3,
        &[1_000, 4_000, 16_000],
        200,
        1_000_000,
        derive_labeled(seed, "beta-rate"),
    )?;
    let slope = table.log_log_slope();
    let (lo, hi) = (
        tol.slope_center - tol.slope_halfwidth,
        tol.slope_center + tol.slope_halfwidth,
    );
    Ok(CriterionResult {
        id: 6,
        name: "Coefficient error rate in N",
        measured: vec![
            ("slope", slope),
            ("beta_ref", table.beta_ref),
            ("population_coefficient", oracle.population_coefficient()),
        ],
        expected: format!("log-log slope in [{lo:.3}, {hi:.3}]"),
        passed: (lo..=hi).contains(&slope),
        seconds: t.elapsed().as_secs_f64(),
    })
}

/// Criteria 1 to 6 in order.
pub fn verify_all(tol: &Tolerances, seed: u64) -> Result<Vec<CriterionResult>> {
    let mut out = vec![check_abc_variance(tol, seed)?];
    out.extend(check_inflation_and_adjustment(tol, seed)?);
    out.push(check_limit_shapes(tol, seed)?);
    out.push(check_regimes(tol, seed)?);
    out.push(check_beta_rate(tol, seed)?);
    Ok(out)
}
