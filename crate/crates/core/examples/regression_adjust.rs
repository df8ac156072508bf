// Local-linear regression adjustment removes the bandwidth-induced
// inflation of the rejection posterior.

use abcreg::kernels::{KernelFamily, KernelSpec, Scaling};
use abcreg::models::{gaussian_sample, GaussianOracle, Model};
use abcreg::regression::{regression_adjust, RegressionOptions};
use abcreg::samplers::{posterior_estimates, run_rejection, AcceptanceMode, ProposalSpec};

pub fn run_example() -> abcreg::Result<()> {
    let oracle = GaussianOracle::new(0.0, 1.0, 1.0, 100)?;
    let s_obs = oracle
        .summarize(&gaussian_sample(&oracle, 0.3, 3))?
        .into_inner();
    let (_, true_var) = oracle.true_posterior(s_obs[0]);

    println!("  eps   raw var  adjusted var  true var  beta_hat");
    for eps in [0.1, 0.3, 1.0] {
        let kernel = KernelSpec::new(KernelFamily::Gaussian, Scaling::Identity, eps)?;
        let run = run_rejection(
            &oracle,
            &s_obs,
            &kernel,
            &ProposalSpec::Prior,
            100_000,
            AcceptanceMode::Bernoulli,
            9,
        )?;
        let raw = posterior_estimates(&run, false)?;
        let adjusted = regression_adjust(&run, &s_obs, &RegressionOptions::default())?;
        let adj = adjusted.estimates(false)?;
        println!(
            "  {eps:3}  {:8.5}  {:12.5}  {true_var:8.5}  {:8.4}",
            raw.cov[(0, 0)],
            adj.cov[(0, 0)],
            adjusted.fit.beta_hat[(0, 0)]
        );
    }
    println!(
        "limiting coefficient {:.4}",
        oracle.population_coefficient()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
