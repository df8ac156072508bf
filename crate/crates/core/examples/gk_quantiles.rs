// The g-and-k distribution: quantile function, sampling and the
// 19 evenly spaced quantile summaries used as ABC summary statistics.

use abcreg::models::{gk_quantile, gk_sample, quantile_summaries, GkModel, GkParams, Model};

pub fn run_example() -> abcreg::Result<()> {
    let params = GkParams::new(3.0, 1.0, 2.0, 0.5)?;
    for p in [0.01, 0.25, 0.5, 0.75, 0.99] {
        println!("Q({p:.2}) = {:8.4}", gk_quantile(p, &params)?);
    }

    let x = gk_sample(10_000, &params, 42);
    let s = quantile_summaries(&x, 19)?;
    let exact: Vec<f64> = (1..=19)
        .map(|k| gk_quantile(k as f64 / 20.0, &params))
        .collect::<abcreg::Result<_>>()?;
    println!("\n  level  empirical    exact");
    for (k, (e, q)) in s.iter().zip(&exact).enumerate() {
        println!("  {:.2}  {e:9.4}  {q:9.4}", (k + 1) as f64 / 20.0);
    }

    // The model bundles prior, simulator and summaries.
    let model = GkModel::standard(500);
    let summary = model.simulate_summary(&params.to_vec(), 7)?;
    println!(
        "\nparameter dim {}, summary dim {}",
        model.param_dim(),
        summary.len()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
