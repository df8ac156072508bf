// Smallest acceptance proportion at which the raw and the adjusted
// posteriors reach a target accuracy, on a reduced g-and-k study grid.

use abcreg::asymptotics::{
    rate_study, summarize_rows, GoldProtocol, RateStudyConfig, Target, TargetMetric,
};

pub fn run_example() -> abcreg::Result<()> {
    let cfg = RateStudyConfig {
        n_values: vec![200],
        c_values: vec![1.0, 2.0],
        datasets: 3,
        targets: vec![
            Target {
                metric: TargetMetric::Sigma,
                value: 0.2,
            },
            Target {
                metric: TargetMetric::Mu,
                value: 0.05,
            },
        ],
        pool_size: 10_000,
        replicates: 2,
        gold: GoldProtocol {
            proposals: 100_000,
            accept_proportion: 2e-3,
            refine_rounds: 1,
            ..GoldProtocol::default()
        },
        ..RateStudyConfig::default()
    };
    let rows = rate_study(&cfg, |cell| {
        if let Some(r) = cell.first() {
            eprintln!("finished n={} c={} dataset={}", r.n, r.c, r.dataset);
        }
    })?;
    println!("   c  method    target       median q  achieved");
    for s in summarize_rows(&rows) {
        println!(
            "  {:2}  {:8}  {:8} {:4}  {:9.4}  {}/{}",
            s.c,
            s.method.as_str(),
            s.target_metric.as_str(),
            s.target_value,
            s.median_q,
            s.achieved,
            s.datasets
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
