use std::path::PathBuf;
use std::process::ExitCode;

use abcreg::commands::{self, StudyOutput};
use abcreg::config::RunConfig;
use abcreg::AbcError;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "abc", version, about = "Kernel ABC with regression adjustment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML configuration; defaults are used for missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
    seed: Option<u64>,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; all cores when omitted.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate datasets at `model.params`.
    Simulate(Common),
    /// Run the sampler and the regression adjustment on one dataset.
    Run(Common),
    /// Required acceptance-rate study or acceptance-rate regime sweep.
    Study(Common),
    /// Check the sampler against the Gaussian conjugate model.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Make every tolerance this many times stricter.
        #[arg(long)]
        tighten: Option<f64>,
    },
    /// Tidy plotting table from an existing `study.csv`.
    Report(Common),
}

fn load(common: &Common) -> Result<RunConfig, AbcError> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    if let Some(k) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| AbcError::Config(format!("threads: {e}")))?;
    }
    Ok(cfg)
}

fn exit_code(err: &AbcError) -> u8 {
    match err {
        AbcError::Config(_) => 2,
        AbcError::ZeroAcceptances { .. } => 3,
        _ => 1,
    }
}

fn execute(cmd: Command) -> Result<u8, AbcError> {
    match cmd {
        Command::Simulate(c) => {
            let cfg = load(&c)?;
            let files = commands::simulate(&cfg)?;
            println!(
                "wrote {} datasets to {}",
                files.len(),
                cfg.output_dir.display()
            );
        }
        Command::Run(c) => {
            let cfg = load(&c)?;
            let s = commands::run(&cfg)?;
            println!(
                "accepted {} (p_acc {:.5} +- {:.5}), epsilon {:.5}, ESS {:.1}",
                s.n_accepted, s.p_acc, s.p_acc_se, s.epsilon, s.ess
            );
            println!("raw      mean {:.5?} sd {:.5?}", s.raw_mean, s.raw_sd);
            if let (Some(m), Some(sd)) = (&s.adjusted_mean, &s.adjusted_sd) {
                println!("adjusted mean {m:.5?} sd {sd:.5?}");
            }
        }
        Command::Study(c) => {
            let cfg = load(&c)?;
            match commands::study(&cfg, |msg| eprintln!("{msg}"))? {
                StudyOutput::RequiredRate { rows, summary } => {
                    println!(
                        "{} study rows, {} summary rows in {}",
                        rows.len(),
                        summary.len(),
                        cfg.output_dir.display()
                    )
                }
                StudyOutput::Regime { rows } => {
                    println!("{} regime rows in {}", rows.len(), cfg.output_dir.display())
                }
            }
        }
        Command::Verify { common, tighten } => {
            let mut cfg = load(&common)?;
            if let Some(t) = tighten {
                cfg.verify.tighten = t;
                cfg.validate()?;
            }
            let results = commands::verify(&cfg)?;
            let mut ok = true;
            for r in &results {
                ok &= r.passed;
                println!(
                    "[{}] {} {}: {} (expected {})",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.id,
                    r.name,
                    r.measured_text(),
                    r.expected
                );
            }
            if !ok {
                return Ok(4);
            }
        }
        Command::Report(c) => {
            let cfg = load(&c)?;
            println!("wrote {}", commands::report(&cfg)?.display());
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
