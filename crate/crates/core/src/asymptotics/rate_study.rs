//! Required acceptance proportions for raw and regression-adjusted g-and-k
//! posteriors under inflated-covariance normal proposals.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::asymptotics::gold::{gold_standard, GoldProtocol};
use crate::asymptotics::required::{
    acceptance_curve, default_q_grid, Method, Target, TargetMetric,
};
use crate::asymptotics::{median, quantile};
use crate::error::{AbcError, Result};
use crate::io::{header_line, read_header};
use crate::kernels::ScalingRule;
use crate::models::{GkModel, Model};
use crate::regression::RegressionOptions;
use crate::rng::{derive_labeled, derive_seed};
use crate::samplers::{make_proposal, sd_offset, SimulationPool};

#[derive(Debug, Clone, PartialEq)]
pub struct RateStudyConfig {
    pub n_values: Vec<usize>,
    /// Proposal covariance inflation factors.
    pub c_values: Vec<f64>,
    pub datasets: usize,
    pub targets: Vec<Target>,
    pub theta0: Vec<f64>,
    /// Proposals per simulation pool.
    pub pool_size: usize,
    /// Pools per cell; errors are medians over pools.
    pub replicates: usize,
    pub q_grid: Vec<f64>,
    /// Proposal mean offset, in posterior standard deviations.
    pub offset_sd: f64,
    pub scaling: ScalingRule,
    pub gold: GoldProtocol,
    pub regression: RegressionOptions,
    pub seed: u64,
    /// Reference posteriors and finished cells are stored here and reused.
    pub cache_dir: Option<PathBuf>,
}

impl Default for RateStudyConfig {
    fn default() -> Self {
        RateStudyConfig {
            n_values: vec![500, 2000],
            c_values: vec![1.0, 2.0],
            datasets: 10,
            targets: vec![
                Target {
                    metric: TargetMetric::Mu,
                    value: 0.08,
                },
                Target {
                    metric: TargetMetric::Mu,
                    value: 0.05,
                },
                Target {
                    metric: TargetMetric::Sigma,
                    value: 0.2,
                },
                Target {
                    metric: TargetMetric::Sigma,
                    value: 0.1,
                },
            ],
            theta0: vec![3.0, 1.0, 2.0, 0.5],
            pool_size: 100_000,
            replicates: 5,
            q_grid: default_q_grid(),
            offset_sd: 0.5,
            scaling: ScalingRule::Mad,
            gold: GoldProtocol::default(),
            regression: RegressionOptions::default(),
            seed: 1,
            cache_dir: None,
        }
    }
}

/// One `(n, c, dataset, method, target)` outcome. Error and acceptance
/// columns refer to the required proportion and are `None` when the target
/// is not met anywhere on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub n: usize,
    pub c: f64,
    pub dataset: usize,
    pub method: Method,
    pub target_metric: TargetMetric,
    pub target_value: f64,
    pub required_q: Option<f64>,
    pub p_acc: Option<f64>,
    pub re_mu: Option<f64>,
    pub re_sigma: Option<f64>,
    pub seed: u64,
}

pub const STUDY_COLUMNS: [&str; 11] = [
    "n",
    "c",
    "dataset",
    "method",
    "target_metric",
    "target_value",
    "required_q",
    "p_acc",
    "RE_mu",
    "RE_sigma",
    "seed",
];

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:?}"))
}

fn parse_opt(s: &str) -> Result<Option<f64>> {
    if s == "NA" {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| AbcError::Config(format!("bad number '{s}' in study table")))
}

impl StudyRow {
    pub fn to_record(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            format!("{:?}", self.c),
            self.dataset.to_string(),
            self.method.as_str().to_string(),
            self.target_metric.as_str().to_string(),
            format!("{:?}", self.target_value),
            opt(self.required_q),
            opt(self.p_acc),
            opt(self.re_mu),
            opt(self.re_sigma),
            self.seed.to_string(),
        ]
    }

    pub fn from_record(rec: &[&str]) -> Result<Self> {
        if rec.len() != STUDY_COLUMNS.len() {
            return Err(AbcError::Dimension {
                context: "study row",
                expected: STUDY_COLUMNS.len(),
                got: rec.len(),
            });
        }
        let bad = |what: &str| AbcError::Config(format!("bad {what} in study table"));
        Ok(StudyRow {
            n: rec[0].parse().map_err(|_| bad("n"))?,
            c: rec[1].parse().map_err(|_| bad("c"))?,
            dataset: rec[2].parse().map_err(|_| bad("dataset"))?,
            method: match rec[3] {
                "raw" => Method::Raw,
                "adjusted" => Method::Adjusted,
                _ => return Err(bad("method")),
            },
            target_metric: rec[4].parse()?,
            target_value: rec[5].parse().map_err(|_| bad("target value"))?,
            required_q: parse_opt(rec[6])?,
            p_acc: parse_opt(rec[7])?,
            re_mu: parse_opt(rec[8])?,
            re_sigma: parse_opt(rec[9])?,
            seed: rec[10].parse().map_err(|_| bad("seed"))?,
        })
    }
}

/// Spread of the required proportion over datasets for one
/// `(n, c, method, target)`. A target missed on a dataset counts as 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub n: usize,
    pub c: f64,
    pub method: Method,
    pub target_metric: TargetMetric,
    pub target_value: f64,
    pub datasets: usize,
    pub achieved: usize,
    pub median_q: f64,
    pub lower_q: f64,
    pub upper_q: f64,
}

pub const SUMMARY_COLUMNS: [&str; 10] = [
    "n",
    "c",
    "method",
    "target_metric",
    "target_value",
    "datasets",
    "achieved",
    "median_q",
    "q_2.5",
    "q_97.5",
];

impl SummaryRow {
    pub fn to_record(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            format!("{:?}", self.c),
            self.method.as_str().to_string(),
            self.target_metric.as_str().to_string(),
            format!("{:?}", self.target_value),
            self.datasets.to_string(),
            self.achieved.to_string(),
            format!("{:?}", self.median_q),
            format!("{:?}", self.lower_q),
            format!("{:?}", self.upper_q),
        ]
    }
}

pub fn summarize_rows(rows: &[StudyRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(usize, f64, Method, TargetMetric, f64)> = Vec::new();
    for r in rows {
        let k = (r.n, r.c, r.method, r.target_metric, r.target_value);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(n, c, method, target_metric, target_value)| {
            let qs: Vec<f64> = rows
                .iter()
                .filter(|r| {
                    r.n == n
                        && r.c == c
                        && r.method == method
                        && r.target_metric == target_metric
                        && r.target_value == target_value
                })
                .map(|r| r.required_q.unwrap_or(0.0))
                .collect();
            let achieved = rows
                .iter()
                .filter(|r| {
                    r.n == n
                        && r.c == c
                        && r.method == method
                        && r.target_metric == target_metric
                        && r.target_value == target_value
                        && r.required_q.is_some()
                })
                .count();
            SummaryRow {
                n,
                c,
                method,
                target_metric,
                target_value,
                datasets: qs.len(),
                achieved,
                median_q: median(&mut qs.clone()),
                lower_q: quantile(&qs, 0.025),
                upper_q: quantile(&qs, 0.975),
            }
        })
        .collect()
}

fn cell_path(dir: &Path, n: usize, c: f64, dataset: usize, seed: u64) -> PathBuf {
    dir.join(format!("cell-n{n}-c{c}-d{dataset}-s{seed}.csv"))
}

/// Hash of every setting that changes a cell's rows other than its
/// `(n, c, dataset, seed)` coordinates, which are in the file name.
fn cell_key(cfg: &RateStudyConfig) -> String {
    let settings = format!(
        "{:?}|{:?}|{}|{}|{:?}|{:?}|{:?}|{:?}|{:?}",
        cfg.theta0,
        cfg.targets,
        cfg.pool_size,
        cfg.replicates,
        cfg.q_grid,
        cfg.offset_sd,
        cfg.scaling,
        cfg.gold,
        cfg.regression
    );
    hex::encode(&Sha256::digest(settings.as_bytes())[..8])
}

fn read_cell(path: &Path, key: &str, expected: usize) -> Option<Vec<StudyRow>> {
    if read_header(path).ok()?.1 != key {
        return None;
    }
    let text = fs::read_to_string(path).ok()?;
    let rows: Vec<StudyRow> = text
        .lines()
        .filter(|l| !l.is_empty() && !l.starts_with('#') && !l.starts_with("n,"))
        .map(|l| StudyRow::from_record(&l.split(',').collect::<Vec<_>>()))
        .collect::<Result<_>>()
        .ok()?;
    (rows.len() == expected).then_some(rows)
}

fn write_cell(path: &Path, header: &str, rows: &[StudyRow]) -> Result<()> {
    let mut text = format!("{header}\n");
    text.push_str(&STUDY_COLUMNS.join(","));
    text.push('\n');
    for r in rows {
        text.push_str(&r.to_record().join(","));
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| AbcError::io(path, e))
}

/// Runs every `(n, dataset, c)` cell in order. `progress` is called after
/// each cell with its rows.
pub fn rate_study(
    cfg: &RateStudyConfig,
    mut progress: impl FnMut(&[StudyRow]),
) -> Result<Vec<StudyRow>> {
    if cfg.n_values.is_empty()
        || cfg.c_values.is_empty()
        || cfg.datasets == 0
        || cfg.targets.is_empty()
    {
        return Err(AbcError::Empty("study grid"));
    }
    if cfg.replicates == 0 || cfg.pool_size == 0 {
        return Err(AbcError::InvalidParameter(
            "pool size and replicates must be >= 1".into(),
        ));
    }
    if let Some(dir) = &cfg.cache_dir {
        fs::create_dir_all(dir).map_err(|e| AbcError::io(dir, e))?;
    }
    let per_cell = cfg.targets.len() * 2;
    let key = cell_key(cfg);
    let mut rows = Vec::new();
    for (ni, &n) in cfg.n_values.iter().enumerate() {
        let model = GkModel::standard(n);
        for dataset in 0..cfg.datasets {
            let data_seed = derive_seed(derive_seed(cfg.seed, ni as u64), dataset as u64);
            let data = model.simulate(&cfg.theta0, derive_labeled(data_seed, "data"))?;
            let mut gold = None;
            for (ci, &c) in cfg.c_values.iter().enumerate() {
                let cell_seed = derive_seed(data_seed, 1 + ci as u64);
                let cached = cfg.cache_dir.as_deref().and_then(|d| {
                    read_cell(&cell_path(d, n, c, dataset, cell_seed), &key, per_cell)
                });
                let cell_rows = match cached {
                    Some(r) => r,
                    None => {
                        if gold.is_none() {
                            gold = Some(gold_standard(
                                &model,
                                &data,
                                &cfg.gold,
                                derive_labeled(data_seed, "gold"),
                                cfg.cache_dir.as_deref(),
                            )?);
                        }
                        let gold = gold.as_ref().expect("set above");
                        let r = run_cell(cfg, &model, &data, gold, n, c, dataset, cell_seed)?;
                        if let Some(d) = &cfg.cache_dir {
                            let path = cell_path(d, n, c, dataset, cell_seed);
                            write_cell(&path, &header_line(&key, cell_seed), &r)?;
                        }
                        r
                    }
                };
                progress(&cell_rows);
                rows.extend(cell_rows);
            }
        }
    }
    Ok(rows)
}

#[allow(clippy::too_many_arguments)]
fn run_cell(
    cfg: &RateStudyConfig,
    model: &GkModel,
    data: &[f64],
    gold: &crate::asymptotics::GoldStandard,
    n: usize,
    c: f64,
    dataset: usize,
    seed: u64,
) -> Result<Vec<StudyRow>> {
    let s_obs = model.summarize(data)?.into_inner();
    let offset = sd_offset(&gold.cov, cfg.offset_sd);
    let proposal = make_proposal(&gold.mean, &gold.cov, c, &offset)?;
    let pools: Vec<SimulationPool> = (0..cfg.replicates)
        .map(|r| {
            SimulationPool::simulate(model, &proposal, cfg.pool_size, derive_seed(seed, r as u64))
        })
        .collect::<Result<_>>()?;
    let scaling = cfg.scaling.fit(pools[0].summaries(), model.summary_dim())?;
    let curve = acceptance_curve(&pools, &s_obs, &scaling, &cfg.q_grid, gold, &cfg.regression)?;
    let mut rows = Vec::with_capacity(cfg.targets.len() * 2);
    for &target in &cfg.targets {
        for method in [Method::Raw, Method::Adjusted] {
            let hit = curve.required(method, target);
            rows.push(StudyRow {
                n,
                c,
                dataset,
                method,
                target_metric: target.metric,
                target_value: target.value,
                required_q: hit.map(|p| p.q),
                p_acc: hit.map(|p| p.p_acc),
                re_mu: hit.map(|p| p.errors(method).0),
                re_sigma: hit.map(|p| p.errors(method).1),
                seed,
            });
        }
    }
    Ok(rows)
}
