// Reference posterior for one g-and-k dataset: a large regression
// adjusted run, refined by re-proposing around the previous answer.

use abcreg::asymptotics::{gold_standard, GoldProtocol};
use abcreg::kernels::ScalingRule;
use abcreg::models::{GkModel, Model};

pub fn run_example() -> abcreg::Result<()> {
    let model = GkModel::standard(500);
    let data = model.simulate(&[3.0, 1.0, 2.0, 0.5], 100)?;
    for rounds in [0, 1, 2] {
        let protocol = GoldProtocol {
            proposals: 200_000,
            accept_proportion: 2e-3,
            scaling: ScalingRule::Mad,
            refine_rounds: rounds,
            ..GoldProtocol::default()
        };
        let gold = gold_standard(&model, &data, &protocol, 7, None)?;
        println!(
            "refinement rounds {rounds}: mean {:.3?} sd {:.3?} ({} accepted)",
            gold.mean, gold.sd, gold.n_accepted
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
