// A normal proposal instead of the prior: importance weights, effective
// sample size and acceptance rate.

use abcreg::kernels::{KernelFamily, KernelSpec, Scaling};
use abcreg::models::{gaussian_sample, GaussianOracle, Model};
use abcreg::samplers::{
    effective_sample_size, make_proposal, posterior_estimates, run_rejection, AcceptanceMode,
    ProposalSpec,
};
use nalgebra::DMatrix;

pub fn run_example() -> abcreg::Result<()> {
    let oracle = GaussianOracle::new(0.0, 1.0, 1.0, 100)?;
    let s_obs = oracle
        .summarize(&gaussian_sample(&oracle, 0.3, 21))?
        .into_inner();
    let kernel = KernelSpec::new(KernelFamily::Gaussian, Scaling::Identity, 0.1)?;
    let (_, exact_var) = oracle.abc_posterior(s_obs[0], 0.1)?;
    let posterior_var = DMatrix::from_element(1, 1, exact_var);

    let mut proposals = vec![("prior".to_string(), ProposalSpec::Prior)];
    for c in [1.0, 2.0, 4.0] {
        let q = make_proposal(&s_obs, &posterior_var, c, &[0.0])?;
        proposals.push((format!("normal c={c}"), q));
    }
    for (name, proposal) in &proposals {
        let run = run_rejection(
            &oracle,
            &s_obs,
            &kernel,
            proposal,
            20_000,
            AcceptanceMode::Bernoulli,
            4,
        )?;
        let m = posterior_estimates(&run, true)?;
        println!(
            "{name:>12}: p_acc {:.3}  accepted {:5}  ESS {:8.1}  var {:.5} (exact {exact_var:.5})",
            run.p_acc_hat,
            run.n_accepted(),
            effective_sample_size(&run.weights()),
            m.cov[(0, 0)]
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
