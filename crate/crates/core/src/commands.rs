//! The five batch commands behind the `abc` binary. Each reads a
//! [`RunConfig`] and writes headed CSV files under `output_dir`.

use std::fs;
use std::path::{Path, PathBuf};

use crate::asymptotics::{
    gold_standard, rate_study, regime_sweep, summarize_rows, CenterRule, ProposalRule, RegimeSpec,
    StudyRow, SummaryRow, SweepSettings, STUDY_COLUMNS, SUMMARY_COLUMNS,
};
use crate::config::RunConfig;
use crate::error::{AbcError, Result};
use crate::io::{header_line, read_dataset, read_table, write_dataset, write_draws, write_table};
use crate::kernels::{bandwidth_from_proportion, KernelSpec};
use crate::models::{Model, ModelSpec};
use crate::regression::{regression_adjust, AdjustedRun};
use crate::rng::{derive_labeled, derive_seed};
use crate::samplers::{
    effective_sample_size, estimate_pacc, make_proposal, posterior_estimates, sd_offset,
    GaussianProposal, ProposalSpec, SimulationPool,
};
use crate::verify::{verify_all, CriterionResult, Tolerances};

fn header(cfg: &RunConfig) -> String {
    header_line(&cfg.hash(), cfg.seed)
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| AbcError::io(dir, e))
}

/// Seed of the `i`-th simulated dataset.
pub fn dataset_seed(seed: u64, i: usize) -> u64 {
    derive_seed(derive_labeled(seed, "datasets"), i as u64)
}

/// Writes `study.datasets` datasets at `model.params` and a manifest.
pub fn simulate(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let model = cfg.model_spec()?;
    let dir = cfg.output_dir.join("datasets");
    prepare_dir(&dir)?;
    let h = header(cfg);
    let mut files = Vec::with_capacity(cfg.study.datasets);
    let mut manifest = Vec::with_capacity(cfg.study.datasets);
    for i in 0..cfg.study.datasets {
        let seed = dataset_seed(cfg.seed, i);
        let data = model.simulate(&cfg.model.params, seed)?;
        let name = format!("dataset-{i:03}.txt");
        let path = dir.join(&name);
        write_dataset(&path, &h, &data)?;
        manifest.push(vec![
            i.to_string(),
            format!("datasets/{name}"),
            seed.to_string(),
            model.name().to_string(),
            model.sample_size().to_string(),
        ]);
        files.push(path);
    }
    write_table(
        &cfg.output_dir.join("manifest.csv"),
        &h,
        &["dataset", "file", "seed", "model", "n"],
        manifest,
    )?;
    Ok(files)
}

/// Posterior summaries of one `run`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub raw_mean: Vec<f64>,
    pub raw_sd: Vec<f64>,
    pub adjusted_mean: Option<Vec<f64>>,
    pub adjusted_sd: Option<Vec<f64>>,
    pub p_acc: f64,
    pub p_acc_se: f64,
    pub n_accepted: usize,
    pub epsilon: f64,
    pub ess: f64,
    pub gram_condition: Option<f64>,
    pub ridge: Option<f64>,
}

fn observed_data(cfg: &RunConfig, model: &ModelSpec) -> Result<Vec<f64>> {
    match &cfg.data {
        Some(path) => read_dataset(path),
        None => model.simulate(&cfg.model.params, dataset_seed(cfg.seed, 0)),
    }
}

fn build_proposal(cfg: &RunConfig, model: &ModelSpec, data: &[f64]) -> Result<ProposalSpec> {
    match cfg.proposal.kind.as_str() {
        "prior" => Ok(ProposalSpec::Prior),
        "normal" => {
            let p = model.param_dim();
            Ok(ProposalSpec::Gaussian(GaussianProposal::new(
                cfg.proposal.mean.clone(),
                cfg.proposal.sd,
                nalgebra::DMatrix::identity(p, p),
            )?))
        }
        _ => {
            let gold = gold_standard(
                model,
                data,
                &cfg.gold_protocol()?,
                derive_labeled(cfg.seed, "gold"),
                Some(&cfg.output_dir.join("gold")),
            )?;
            let offset = sd_offset(&gold.cov, cfg.proposal.offset_sd);
            make_proposal(&gold.mean, &gold.cov, cfg.proposal.c, &offset)
        }
    }
}

/// Sampler plus optional regression adjustment. Writes `draws.csv` (every
/// proposal) and `summary.csv`.
pub fn run(cfg: &RunConfig) -> Result<RunSummary> {
    let model = cfg.model_spec()?;
    let data = observed_data(cfg, &model)?;
    let s_obs = model.summarize(&data)?.into_inner();
    let proposal = build_proposal(cfg, &model, &data)?;
    let pool = SimulationPool::simulate(
        &model,
        &proposal,
        cfg.sampler.n_proposals,
        derive_labeled(cfg.seed, "run"),
    )?;
    let scaling = cfg.scaling_rule()?.fit(
        pool.summaries().take(cfg.kernel.pilot.max(2)),
        model.summary_dim(),
    )?;
    let distances = pool.distances(&scaling, &s_obs)?;
    let epsilon = if cfg.kernel.bandwidth == "proportion" {
        let e = bandwidth_from_proportion(&distances, cfg.kernel.accept_proportion)?;
        if !e.is_finite() {
            return Err(AbcError::ZeroAcceptances {
                proposed: pool.len(),
            });
        }
        e.max(f64::MIN_POSITIVE)
    } else {
        cfg.kernel.epsilon
    };
    let kernel = KernelSpec::new(cfg.kernel_family()?, scaling, epsilon)?;
    let mode = cfg.sampler_mode()?;
    let run = pool
        .accept_with_distances(&distances, &kernel, mode)
        .require_nonempty()?;
    let raw = posterior_estimates(&run, cfg.regression.use_weights)?;
    let adjusted: Option<AdjustedRun> = if cfg.regression.enabled {
        Some(regression_adjust(&run, &s_obs, &cfg.regression_options())?)
    } else {
        None
    };
    let adj_moments = adjusted
        .as_ref()
        .map(|a| a.estimates(cfg.regression.use_weights))
        .transpose()?;
    let (p_acc, p_acc_se) = estimate_pacc(&run);
    let summary = RunSummary {
        raw_sd: raw.sd(),
        raw_mean: raw.mean.clone(),
        adjusted_sd: adj_moments.as_ref().map(|m| m.sd()),
        adjusted_mean: adj_moments.map(|m| m.mean),
        p_acc,
        p_acc_se,
        n_accepted: run.n_accepted(),
        epsilon,
        ess: effective_sample_size(&run.weights()),
        gram_condition: adjusted.as_ref().map(|a| a.fit.gram_condition),
        ridge: adjusted.as_ref().map(|a| a.fit.ridge_applied),
    };

    prepare_dir(&cfg.output_dir)?;
    let h = header(cfg);
    let all = pool.all_draws(&distances, &kernel, mode);
    write_draws(
        &cfg.output_dir.join("draws.csv"),
        &h,
        &all,
        model.param_dim(),
        model.summary_dim(),
        adjusted
            .as_ref()
            .map(|a| (a.source_indices.as_slice(), a.theta_star.as_slice())),
    )?;
    write_table(
        &cfg.output_dir.join("summary.csv"),
        &h,
        &["quantity", "method", "param", "value"],
        summary_rows(&summary),
    )?;
    Ok(summary)
}

fn summary_rows(s: &RunSummary) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    let mut push = |q: &str, m: &str, p: &str, v: f64| {
        rows.push(vec![q.into(), m.into(), p.into(), format!("{v:?}")])
    };
    for (j, (m, sd)) in s.raw_mean.iter().zip(&s.raw_sd).enumerate() {
        push("mean", "raw", &format!("theta_{}", j + 1), *m);
        push("sd", "raw", &format!("theta_{}", j + 1), *sd);
    }
    if let (Some(mean), Some(sd)) = (&s.adjusted_mean, &s.adjusted_sd) {
        for (j, (m, sd)) in mean.iter().zip(sd).enumerate() {
            push("mean", "adjusted", &format!("theta_{}", j + 1), *m);
            push("sd", "adjusted", &format!("theta_{}", j + 1), *sd);
        }
    }
    push("p_acc", "", "", s.p_acc);
    push("p_acc_se", "", "", s.p_acc_se);
    push("n_accepted", "", "", s.n_accepted as f64);
    push("epsilon", "", "", s.epsilon);
    push("ess", "", "", s.ess);
    if let Some(c) = s.gram_condition {
        push("gram_condition", "adjusted", "", c);
    }
    if let Some(r) = s.ridge {
        push("ridge", "adjusted", "", r);
    }
    rows
}

pub enum StudyOutput {
    RequiredRate {
        rows: Vec<StudyRow>,
        summary: Vec<SummaryRow>,
    },
    Regime {
        rows: Vec<Vec<String>>,
    },
}

/// Required-rate study or regime sweep, per `study.kind`. The rate study
/// keeps one file per finished cell under `cells/` and skips those on a
/// rerun.
pub fn study(cfg: &RunConfig, mut progress: impl FnMut(&str)) -> Result<StudyOutput> {
    prepare_dir(&cfg.output_dir)?;
    let h = header(cfg);
    if cfg.study.kind == "regime" {
        return regime(cfg, &h, progress);
    }
    let fig = cfg.rate_study()?;
    let rows = rate_study(&fig, |cell| {
        if let Some(r) = cell.first() {
            progress(&format!(
                "cell n={} c={} dataset={} done",
                r.n, r.c, r.dataset
            ));
        }
    })?;
    let summary = summarize_rows(&rows);
    write_table(
        &cfg.output_dir.join("study.csv"),
        &h,
        &STUDY_COLUMNS,
        rows.iter().map(StudyRow::to_record),
    )?;
    write_table(
        &cfg.output_dir.join("study_summary.csv"),
        &h,
        &SUMMARY_COLUMNS,
        summary.iter().map(SummaryRow::to_record),
    )?;
    Ok(StudyOutput::RequiredRate { rows, summary })
}

fn regime(cfg: &RunConfig, h: &str, mut progress: impl FnMut(&str)) -> Result<StudyOutput> {
    let model = cfg.model_spec()?;
    let p = model.param_dim();
    let settings = SweepSettings {
        n_grid: cfg.study.n_values.clone(),
        proposals: cfg.sampler.n_proposals,
        kernel: cfg.kernel_family()?,
        proposal: ProposalRule {
            sigma_ratio: cfg.study.sigma_ratio,
            center: CenterRule::Gold(cfg.gold_protocol()?),
        },
    };
    let mut columns: Vec<String> = [
        "eps_rate",
        "eps_class",
        "n",
        "epsilon",
        "sigma",
        "p_acc",
        "se",
        "n_accepted",
    ]
    .map(String::from)
    .to_vec();
    columns.extend((1..=p).map(|j| format!("mean_{j}")));
    columns.extend((1..=p).map(|j| format!("sd_{j}")));
    columns.push("seed".into());
    let mut rows = Vec::new();
    for (k, &rate) in cfg.study.eps_rates.iter().enumerate() {
        let spec = RegimeSpec::root_n(cfg.study.eps_scale, rate);
        let points = regime_sweep(
            &model,
            &cfg.model.params,
            &spec,
            &settings,
            derive_seed(cfg.seed, k as u64),
        )?;
        progress(&format!("bandwidth rate {rate} done"));
        for pt in points {
            let mut r = vec![
                format!("{rate:?}"),
                spec.eps_class().as_str().to_string(),
                pt.n.to_string(),
                format!("{:?}", pt.epsilon),
                format!("{:?}", pt.sigma),
                format!("{:?}", pt.p_acc),
                format!("{:?}", pt.se),
                pt.n_accepted.to_string(),
            ];
            r.extend(pt.mean.iter().map(|x| format!("{x:?}")));
            r.extend(pt.sd.iter().map(|x| format!("{x:?}")));
            r.push(pt.seed.to_string());
            rows.push(r);
        }
    }
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    write_table(&cfg.output_dir.join("regime.csv"), h, &cols, rows.clone())?;
    Ok(StudyOutput::Regime { rows })
}

/// Gaussian-model checks; writes `verify.csv`.
pub fn verify(cfg: &RunConfig) -> Result<Vec<CriterionResult>> {
    let tol = Tolerances::default().tightened(cfg.verify.tighten);
    let results = verify_all(&tol, cfg.seed)?;
    prepare_dir(&cfg.output_dir)?;
    write_table(
        &cfg.output_dir.join("verify.csv"),
        &header(cfg),
        &[
            "criterion",
            "name",
            "measured",
            "expected",
            "passed",
            "seconds",
        ],
        results.iter().map(|r| {
            vec![
                r.id.to_string(),
                r.name.to_string(),
                r.measured_text(),
                r.expected.clone(),
                r.passed.to_string(),
                format!("{:.2}", r.seconds),
            ]
        }),
    )?;
    Ok(results)
}

/// Tidy plotting table `report.csv` recomputed from `study.csv`:
/// one row per `(n, c, method, target, statistic)`.
pub fn report(cfg: &RunConfig) -> Result<PathBuf> {
    let input = cfg.output_dir.join("study.csv");
    let (columns, records) = read_table(&input)?;
    if columns != STUDY_COLUMNS {
        return Err(AbcError::Config(format!(
            "{}: unexpected columns",
            input.display()
        )));
    }
    let rows: Vec<StudyRow> = records
        .iter()
        .map(|r| StudyRow::from_record(&r.iter().map(String::as_str).collect::<Vec<_>>()))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for s in summarize_rows(&rows) {
        for (stat, v) in [
            ("median", s.median_q),
            ("lower", s.lower_q),
            ("upper", s.upper_q),
            ("achieved", s.achieved as f64 / s.datasets as f64),
        ] {
            out.push(vec![
                s.n.to_string(),
                format!("{:?}", s.c),
                s.method.as_str().to_string(),
                s.target_metric.as_str().to_string(),
                format!("{:?}", s.target_value),
                stat.to_string(),
                format!("{v:?}"),
            ]);
        }
    }
    let path = cfg.output_dir.join("report.csv");
    write_table(
        &path,
        &header(cfg),
        &[
            "n",
            "c",
            "method",
            "target_metric",
            "target_value",
            "statistic",
            "value",
        ],
        out,
    )?;
    Ok(path)
}
