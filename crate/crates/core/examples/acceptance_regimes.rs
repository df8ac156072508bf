// Acceptance probability as the sample size grows, for bandwidths that
// shrink slower or faster than the summary's noise.

use abcreg::asymptotics::{regime_sweep, CenterRule, ProposalRule, RegimeSpec, SweepSettings};
use abcreg::kernels::KernelFamily;
use abcreg::models::{GaussianOracle, ModelSpec};

pub fn run_example() -> abcreg::Result<()> {
    let model = ModelSpec::Gaussian(GaussianOracle::new(0.0, 1.0, 1.0, 100)?);
    let settings = SweepSettings {
        n_grid: vec![100, 1_000, 10_000, 100_000],
        proposals: 20_000,
        kernel: KernelFamily::Uniform,
        proposal: ProposalRule {
            sigma_ratio: 0.3,
            center: CenterRule::Fixed(vec![0.3]),
        },
    };
    for rate in [0.4, 0.5, 0.75] {
        let spec = RegimeSpec::root_n(1.0, rate);
        println!("epsilon = n^-{rate} ({})", spec.eps_class().as_str());
        for pt in regime_sweep(&model, &[0.3], &spec, &settings, 1)? {
            println!(
                "  n {:6}  eps {:.4}  p_acc {:.4} +- {:.4}",
                pt.n, pt.epsilon, pt.p_acc, pt.se
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
