// Choose the bandwidth as a distance order statistic and re-threshold one
// stored pool of simulations at several acceptance proportions.

use abcreg::kernels::{bandwidth_from_proportion, KernelFamily, KernelSpec, ScalingRule};
use abcreg::models::{GkModel, Model};
use abcreg::regression::{regression_adjust, RegressionOptions};
use abcreg::samplers::{posterior_estimates, AcceptanceMode, ProposalSpec, SimulationPool};

pub fn run_example() -> abcreg::Result<()> {
    let model = GkModel::standard(200);
    let s_obs = model.simulate_summary(&[3.0, 1.0, 2.0, 0.5], 1)?;
    let pool = SimulationPool::simulate(&model, &ProposalSpec::Prior, 20_000, 2)?;
    let scaling = ScalingRule::Mad.fit(pool.summaries(), model.summary_dim())?;
    let distances = pool.distances(&scaling, &s_obs)?;

    println!("      q   epsilon  accepted  raw mean (a, b, g, k)             adjusted mean");
    for q in [0.2, 0.05, 0.01] {
        let eps = bandwidth_from_proportion(&distances, q)?;
        let kernel = KernelSpec::new(KernelFamily::Uniform, scaling.clone(), eps)?;
        let run = pool.accept_with_distances(&distances, &kernel, AcceptanceMode::Threshold);
        let raw = posterior_estimates(&run, true)?;
        let adj =
            regression_adjust(&run, &s_obs, &RegressionOptions::default())?.estimates(true)?;
        println!(
            "  {q:5}  {eps:8.3}  {:8}  {:.2?}  {:.2?}",
            run.n_accepted(),
            raw.mean,
            adj.mean
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
