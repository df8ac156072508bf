// Shapes of the rescaled posteriors when the bandwidth dominates the
// noise: raw draws follow the kernel, adjusted draws are normal.

use abcreg::asymptotics::{shape_test, LimitReference};
use abcreg::kernels::{KernelFamily, KernelSpec, Scaling};
use abcreg::models::{gaussian_sample, GaussianOracle, Model};
use abcreg::regression::{regression_adjust, RegressionOptions};
use abcreg::samplers::{run_rejection, AcceptanceMode, ProposalSpec};

pub fn run_example() -> abcreg::Result<()> {
    let oracle = GaussianOracle::new(0.0, 1.0, 1.0, 10_000)?;
    let s_obs = oracle
        .summarize(&gaussian_sample(&oracle, 0.0, 8))?
        .into_inner();
    let eps = 0.1;
    for family in [KernelFamily::Uniform, KernelFamily::Epanechnikov] {
        let kernel = KernelSpec::new(family, Scaling::Identity, eps)?;
        let run = run_rejection(
            &oracle,
            &s_obs,
            &kernel,
            &ProposalSpec::Prior,
            50_000,
            AcceptanceMode::Bernoulli,
            2,
        )?;
        let raw: Vec<f64> = run.draws.iter().map(|d| d.theta[0]).collect();
        let ks_raw = shape_test(
            &raw,
            None,
            &LimitReference::KernelShape { family, ds: 1.0 },
            1.0 / eps,
        )?;
        let adjusted = regression_adjust(&run, &s_obs, &RegressionOptions::default())?;
        let adj: Vec<f64> = adjusted.theta_star.iter().map(|t| t[0]).collect();
        let normal = LimitReference::Normal {
            var: 1.0 / oracle.information(),
        };
        let ks_adj = shape_test(&adj, None, &normal, oracle.summary_rate())?;
        println!(
            "{:>13}: {} accepted, KS raw vs kernel shape {ks_raw:.4}, KS adjusted vs normal {ks_adj:.4}",
            family.as_str(),
            raw.len()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
