// Drive a run from a TOML configuration, the same path the `abc` binary
// takes, and read back the files it writes.

use abcreg::commands;
use abcreg::config::RunConfig;
use abcreg::io::{read_header, read_table};

const CONFIG: &str = r#"
model.name = "gaussian"
model.params = [0.3]
model.n = 100
kernel.family = "gaussian"
kernel.bandwidth = "fixed"
kernel.epsilon = 0.2
sampler.N = 20000
regression.enabled = true
seed = 5
"#;

pub fn run_example() -> abcreg::Result<()> {
    let mut cfg = RunConfig::parse(CONFIG)?;
    let dir = std::env::temp_dir().join(format!("abcreg-config-run-{}", std::process::id()));
    cfg.output_dir = dir.clone();
    println!("config hash {}", cfg.hash());

    let summary = commands::run(&cfg)?;
    println!(
        "accepted {} (p_acc {:.4}), raw mean {:.4}, adjusted mean {:.4?}",
        summary.n_accepted, summary.p_acc, summary.raw_mean[0], summary.adjusted_mean
    );

    let (version, hash, seed) = read_header(&dir.join("summary.csv"))?;
    println!("summary.csv written by version {version}, config {hash}, seed {seed}");
    let (columns, rows) = read_table(&dir.join("draws.csv"))?;
    println!(
        "draws.csv: {} rows, columns {}",
        rows.len(),
        columns.join(",")
    );
    std::fs::remove_dir_all(&dir).ok();
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
