//! Property checks shared by `properties.rs` and the acceptance suite.
#![allow(dead_code)]

use abcreg::kernels::{KernelFamily, KernelSpec, Scaling};
use abcreg::models::{gk_quantile, GaussianOracle, GkModel, GkParams, Model};
use abcreg::regression::{adjust, fit_linear, RegressionOptions};
use abcreg::rng::rng_from_seed;
use abcreg::samplers::{
    run_rejection, weighted_moments, AbcDraw, AbcRun, AcceptanceMode, ProposalSpec,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn draws(thetas: Vec<Vec<f64>>, ss: Vec<Vec<f64>>, weights: Vec<f64>) -> Vec<AbcDraw> {
    thetas
        .into_iter()
        .zip(ss)
        .zip(weights)
        .enumerate()
        .map(|(i, ((theta, s), weight))| AbcDraw {
            index: i,
            theta,
            s,
            distance: 0.0,
            kernel_value: 1.0,
            weight,
            accepted: true,
        })
        .collect()
}

pub fn run_of(draws: Vec<AbcDraw>) -> AbcRun {
    let n = draws.len();
    AbcRun {
        draws,
        n_proposed: n,
        p_acc_hat: 1.0,
        epsilon: 1.0,
        seed: 0,
        mode: AcceptanceMode::Threshold,
    }
}

fn normals(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    (0..k).map(|_| rng.sample(StandardNormal)).collect()
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// Exactly linear `theta = alpha + beta (s - s_obs)` is recovered.
pub fn check_ols_recovery(p: usize, d: usize, seed: u64) -> Result<(), TestCaseError> {
    let mut rng = rng_from_seed(seed);
    let alpha = normals(&mut rng, p);
    let beta = DMatrix::from_fn(p, d, |_, _| 3.0 * rng.sample::<f64, _>(StandardNormal));
    let s_obs = normals(&mut rng, d);
    let m = 40 + 10 * d;
    let ss: Vec<Vec<f64>> = (0..m).map(|_| normals(&mut rng, d)).collect();
    let thetas: Vec<Vec<f64>> = ss
        .iter()
        .map(|s| {
            (0..p)
                .map(|a| {
                    alpha[a]
                        + (0..d)
                            .map(|k| beta[(a, k)] * (s[k] - s_obs[k]))
                            .sum::<f64>()
                })
                .collect()
        })
        .collect();
    let w: Vec<f64> = (0..m).map(|_| rng.random_range(0.2..2.0)).collect();
    let fit = fit_linear(&draws(thetas, ss, w), &s_obs, &RegressionOptions::default())
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(fit.ridge_applied, 0.0);
    for a in 0..p {
        prop_assert!(
            rel_err(fit.alpha_hat[a], alpha[a]) < 1e-10,
            "alpha {} vs {}",
            fit.alpha_hat[a],
            alpha[a]
        );
        for k in 0..d {
            prop_assert!(rel_err(fit.beta_hat[(a, k)], beta[(a, k)]) < 1e-10);
        }
    }
    Ok(())
}

/// Count and weights carried; weighted mean identity; unweighted variance
/// decomposition `var(theta*) = var(theta) - beta var(s) beta^T`.
pub fn check_adjustment_identities(
    p: usize,
    d: usize,
    weighted: bool,
    seed: u64,
) -> Result<(), TestCaseError> {
    let mut rng = rng_from_seed(seed);
    let m = 60 + 10 * d;
    let s_obs = normals(&mut rng, d);
    let ss: Vec<Vec<f64>> = (0..m).map(|_| normals(&mut rng, d)).collect();
    let thetas: Vec<Vec<f64>> = ss
        .iter()
        .map(|s| {
            (0..p)
                .map(|a| s[a % d] * (a as f64 + 0.5) + rng.sample::<f64, _>(StandardNormal))
                .collect()
        })
        .collect();
    let w: Vec<f64> = if weighted {
        (0..m).map(|_| rng.random_range(0.1..3.0)).collect()
    } else {
        vec![1.0; m]
    };
    let run = run_of(draws(thetas.clone(), ss.clone(), w.clone()));
    let opts = RegressionOptions::default();
    let fit =
        fit_linear(&run.draws, &s_obs, &opts).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let adj = adjust(&run, &fit, &s_obs).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(adj.theta_star.len(), m);
    prop_assert_eq!(&adj.weights, &w);

    let total: f64 = w.iter().sum();
    let wmean = |rows: &[Vec<f64>], j: usize| {
        rows.iter().zip(&w).map(|(r, wi)| wi * r[j]).sum::<f64>() / total
    };
    for a in 0..p {
        let shift: f64 = (0..d)
            .map(|k| fit.beta_hat[(a, k)] * (wmean(&ss, k) - s_obs[k]))
            .sum();
        let expected = wmean(&thetas, a) - shift;
        prop_assert!(
            (wmean(&adj.theta_star, a) - expected).abs() < 1e-12 * expected.abs().max(1.0)
        );
        // The adjusted weighted mean is the intercept.
        prop_assert!((wmean(&adj.theta_star, a) - fit.alpha_hat[a]).abs() < 1e-10);
    }
    if !weighted {
        let raw = weighted_moments(&thetas, None).unwrap().cov;
        let star = weighted_moments(&adj.theta_star, None).unwrap().cov;
        let vs = weighted_moments(&ss, None).unwrap().cov;
        let expected = &raw - &fit.beta_hat * vs * fit.beta_hat.transpose();
        for a in 0..p {
            for b in 0..p {
                prop_assert!(
                    (star[(a, b)] - expected[(a, b)]).abs() < 1e-10 * raw[(a, a)].max(1.0),
                    "{} vs {}",
                    star[(a, b)],
                    expected[(a, b)]
                );
            }
        }
    }
    Ok(())
}

/// `K(0) = 1`, `0 <= K <= 1`, `K(v) = K(-v)` and `K` nonincreasing along a ray.
pub fn check_kernel_axioms(
    family: KernelFamily,
    v: &[f64],
    t1: f64,
    t2: f64,
) -> Result<(), TestCaseError> {
    let d = v.len();
    let kern = KernelSpec::new(family, Scaling::Identity, 1.0).unwrap();
    prop_assert_eq!(kern.eval(&vec![0.0; d]).unwrap(), 1.0);
    let k = kern.eval(v).unwrap();
    prop_assert!((0.0..=1.0).contains(&k));
    let neg: Vec<f64> = v.iter().map(|x| -x).collect();
    prop_assert_eq!(kern.eval(&neg).unwrap(), k);
    let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
    let at = |t: f64| {
        kern.eval(&v.iter().map(|x| t * x).collect::<Vec<_>>())
            .unwrap()
    };
    prop_assert!(
        at(lo) >= at(hi),
        "not monotone along ray: {} < {}",
        at(lo),
        at(hi)
    );
    Ok(())
}

/// Strictly increasing on a 1000-point grid of levels.
pub fn check_gk_monotone(theta: [f64; 4]) -> Result<(), TestCaseError> {
    let p = GkParams::from_slice(&theta).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let mut prev = f64::NEG_INFINITY;
    for i in 1..=1000 {
        let x = i as f64 / 1001.0;
        let q = gk_quantile(x, &p).unwrap();
        prop_assert!(q > prev, "not increasing at x={x} for {theta:?}");
        prev = q;
    }
    Ok(())
}

/// Identical runs for the same seed, whatever the worker count.
pub fn check_bit_identical(seed: u64) -> Result<(), TestCaseError> {
    let model = GkModel::standard(100);
    let s_obs = model
        .simulate_summary(&[3.0, 1.0, 2.0, 0.5], seed ^ 0x5eed)
        .unwrap()
        .into_inner();
    let kernel = KernelSpec::new(KernelFamily::Gaussian, Scaling::Identity, 5.0).unwrap();
    let go = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                run_rejection(
                    &model,
                    &s_obs,
                    &kernel,
                    &ProposalSpec::Prior,
                    2_000,
                    AcceptanceMode::Bernoulli,
                    seed,
                )
                .unwrap()
            })
    };
    let a = go(1);
    prop_assert_eq!(&a, &go(1));
    prop_assert_eq!(&a, &go(3));

    let oracle = GaussianOracle::new(0.0, 1.0, 1.0, 50).unwrap();
    prop_assert_eq!(
        oracle.simulate(&[0.2], seed).unwrap(),
        oracle.simulate(&[0.2], seed).unwrap()
    );
    Ok(())
}
