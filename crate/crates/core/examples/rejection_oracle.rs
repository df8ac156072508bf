// Rejection ABC on the conjugate Gaussian model, where the ABC posterior
// with a Gaussian kernel is known in closed form.

use abcreg::kernels::{KernelFamily, KernelSpec, Scaling};
use abcreg::models::{gaussian_sample, GaussianOracle, Model};
use abcreg::samplers::{
    estimate_pacc, posterior_estimates, run_rejection, AcceptanceMode, ProposalSpec,
};

pub fn run_example() -> abcreg::Result<()> {
    let oracle = GaussianOracle::new(0.0, 1.0, 1.0, 100)?;
    let data = gaussian_sample(&oracle, 0.3, 11);
    let s_obs = oracle.summarize(&data)?.into_inner();

    for eps in [0.05, 0.1, 0.3] {
        let kernel = KernelSpec::new(KernelFamily::Gaussian, Scaling::Identity, eps)?;
        let run = run_rejection(
            &oracle,
            &s_obs,
            &kernel,
            &ProposalSpec::Prior,
            100_000,
            AcceptanceMode::Bernoulli,
            5,
        )?;
        let m = posterior_estimates(&run, false)?;
        let (mean, var) = oracle.abc_posterior(s_obs[0], eps)?;
        let (p, se) = estimate_pacc(&run);
        println!(
            "eps {eps:4}: mean {:.4} (exact {mean:.4})  var {:.5} (exact {var:.5})  p_acc {p:.4} +- {se:.4}",
            m.mean[0],
            m.cov[(0, 0)]
        );
    }
    let (mean, var) = oracle.true_posterior(s_obs[0]);
    println!("true posterior: mean {mean:.4} var {var:.5}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
