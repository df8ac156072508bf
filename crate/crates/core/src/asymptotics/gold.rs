//! Reference posterior moments for relative-error metrics.
//!
//! Protocol: threshold ABC with `proposals` draws, bandwidth set to accept
//! proportion `accept_proportion`, followed by the regression adjustment.
//! Results are cached on disk keyed by a hash of the dataset, the model,
//! the protocol and the seed.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use sha2::{Digest, Sha256};

use crate::error::{AbcError, Result};
use crate::io::header_line;
use crate::kernels::{Scaling, ScalingRule};
use crate::models::Model;
use crate::regression::{regression_adjust, RegressionOptions};
use crate::rng::derive_labeled;
use crate::samplers::{make_proposal, run_threshold_by_proportion, ProposalSpec, SimulationPool};

#[derive(Debug, Clone, PartialEq)]
pub struct GoldProtocol {
    pub proposals: usize,
    pub accept_proportion: f64,
    /// Summary scaling, estimated from `pilot` draws of the proposal.
    pub scaling: ScalingRule,
    pub pilot: usize,
    /// Extra rounds that re-run the protocol with a normal proposal built
    /// from the previous round (`c = refine_inflation`, no offset).
    pub refine_rounds: usize,
    pub refine_inflation: f64,
}

impl Default for GoldProtocol {
    fn default() -> Self {
        GoldProtocol {
            proposals: 2_000_000,
            accept_proportion: 1e-3,
            scaling: ScalingRule::Mad,
            pilot: 10_000,
            refine_rounds: 2,
            refine_inflation: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoldStandard {
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
    pub cov: DMatrix<f64>,
    pub n_accepted: usize,
    pub epsilon: f64,
}

fn cache_key<M: Model + ?Sized>(
    model: &M,
    dataset: &[f64],
    protocol: &GoldProtocol,
    seed: u64,
) -> String {
    let mut h = Sha256::new();
    h.update(model.name().as_bytes());
    h.update((model.sample_size() as u64).to_le_bytes());
    h.update((model.summary_dim() as u64).to_le_bytes());
    for x in dataset {
        h.update(x.to_le_bytes());
    }
    h.update(format!("{protocol:?}").as_bytes());
    h.update(seed.to_le_bytes());
    hex::encode(&h.finalize()[..12])
}

fn write_cache(path: &Path, key: &str, seed: u64, gold: &GoldStandard) -> Result<()> {
    let join = |v: &mut dyn Iterator<Item = f64>| {
        v.map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")
    };
    let text = format!(
        "{}\nmean,{}\nsd,{}\ncov,{}\nn_accepted,{}\nepsilon,{:?}\n",
        header_line(&key[..16], seed),
        join(&mut gold.mean.iter().copied()),
        join(&mut gold.sd.iter().copied()),
        join(&mut gold.cov.iter().copied()),
        gold.n_accepted,
        gold.epsilon
    );
    fs::write(path, text).map_err(|e| AbcError::io(path, e))
}

fn read_cache(path: &Path, p: usize) -> Option<GoldStandard> {
    let text = fs::read_to_string(path).ok()?;
    let mut fields = std::collections::HashMap::new();
    for line in text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
    {
        let (k, v) = line.split_once(',')?;
        fields.insert(k, v);
    }
    let floats = |k: &str| -> Option<Vec<f64>> {
        fields.get(k)?.split(',').map(|x| x.parse().ok()).collect()
    };
    let mean = floats("mean")?;
    let sd = floats("sd")?;
    let cov = floats("cov")?;
    if mean.len() != p || sd.len() != p || cov.len() != p * p {
        return None;
    }
    if mean.iter().chain(&sd).chain(&cov).any(|x| !x.is_finite()) {
        return None;
    }
    Some(GoldStandard {
        mean,
        sd,
        cov: DMatrix::from_column_slice(p, p, &cov),
        n_accepted: fields.get("n_accepted")?.parse().ok()?,
        epsilon: fields.get("epsilon")?.parse().ok()?,
    })
}

fn one_round<M: Model + ?Sized>(
    model: &M,
    s_obs: &[f64],
    protocol: &GoldProtocol,
    proposal: &ProposalSpec,
    seed: u64,
) -> Result<GoldStandard> {
    let scaling = if protocol.scaling == ScalingRule::Identity {
        Scaling::Identity
    } else {
        let pilot = SimulationPool::simulate(
            model,
            proposal,
            protocol.pilot,
            derive_labeled(seed, "pilot"),
        )?;
        protocol
            .scaling
            .fit(pilot.summaries(), model.summary_dim())?
    };
    let run = run_threshold_by_proportion(
        model,
        s_obs,
        &scaling,
        proposal,
        protocol.proposals,
        protocol.accept_proportion,
        seed,
    )?;
    let adjusted = regression_adjust(&run, s_obs, &RegressionOptions::default())?;
    let m = adjusted.estimates(true)?;
    Ok(GoldStandard {
        sd: m.sd(),
        mean: m.mean,
        cov: m.cov,
        n_accepted: run.n_accepted(),
        epsilon: run.epsilon,
    })
}

/// Reference posterior mean and sd for `dataset`, optionally cached under
/// `cache_dir`. A missing or unreadable cache entry is recomputed.
pub fn gold_standard<M: Model + ?Sized>(
    model: &M,
    dataset: &[f64],
    protocol: &GoldProtocol,
    seed: u64,
    cache_dir: Option<&Path>,
) -> Result<GoldStandard> {
    let key = cache_key(model, dataset, protocol, seed);
    let cache_path: Option<PathBuf> = cache_dir.map(|d| d.join(format!("gold-{key}.txt")));
    if let Some(path) = &cache_path {
        if let Some(hit) = read_cache(path, model.param_dim()) {
            return Ok(hit);
        }
    }
    let s_obs = model.summarize(dataset)?;
    let mut gold = one_round(model, &s_obs, protocol, &ProposalSpec::Prior, seed)?;
    for round in 0..protocol.refine_rounds {
        let zero = vec![0.0; gold.mean.len()];
        let proposal = make_proposal(&gold.mean, &gold.cov, protocol.refine_inflation, &zero)?;
        let round_seed = derive_labeled(seed, &format!("refine-{round}"));
        gold = one_round(model, &s_obs, protocol, &proposal, round_seed)?;
    }
    if let Some(path) = &cache_path {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| AbcError::io(dir, e))?;
        }
        write_cache(path, &key, seed, &gold)?;
    }
    Ok(gold)
}
