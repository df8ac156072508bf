//! Run and study configuration.
//!
//! The on-disk format is TOML restricted to dotted keys at the top level:
//!
//! ```text
//! model.name = "gk"
//! model.params = [3.0, 1.0, 2.0, 0.5]
//! kernel.family = "uniform"
//! sampler.N = 100000
//! seed = 1
//! ```
//!
//! Every key has a default, so an empty file is a valid configuration.
//! [`RunConfig::to_canonical`] writes every key, sorted, one per line; its
//! SHA-256 prefix is the configuration hash stamped on outputs.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::asymptotics::{default_q_grid, GoldProtocol, RateStudyConfig, Target, TargetMetric};
use crate::error::{AbcError, Result};
use crate::kernels::{KernelFamily, ScalingRule};
use crate::models::{GaussianOracle, GkModel, Model, ModelSpec, Prior};
use crate::regression::RegressionOptions;
use crate::samplers::AcceptanceMode;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    /// `gk` or `gaussian`.
    pub name: String,
    /// Parameter value used to generate datasets.
    pub params: Vec<f64>,
    pub n: usize,
    /// g-and-k: number of quantile summaries.
    pub summaries: usize,
    /// g-and-k: bounds of the uniform prior box (same in every coordinate).
    pub prior_lower: f64,
    pub prior_upper: f64,
    /// Gaussian oracle prior and noise.
    pub prior_mean: f64,
    pub prior_var: f64,
    pub noise_var: f64,
    /// Use the distribution-preserving summary shortcut where available.
    pub fast_summaries: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            name: "gk".into(),
            params: vec![3.0, 1.0, 2.0, 0.5],
            n: 500,
            summaries: 19,
            prior_lower: 0.0,
            prior_upper: 10.0,
            prior_mean: 0.0,
            prior_var: 1.0,
            noise_var: 1.0,
            fast_summaries: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelConfig {
    pub family: String,
    /// `identity`, `variance` or `mad`.
    pub scaling: String,
    /// `proportion`: the bandwidth accepts `accept_proportion` of the
    /// proposals. `fixed`: the bandwidth is `epsilon`.
    pub bandwidth: String,
    pub epsilon: f64,
    pub accept_proportion: f64,
    /// Proposals used to estimate the scaling.
    pub pilot: usize,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            family: "uniform".into(),
            scaling: "identity".into(),
            bandwidth: "proportion".into(),
            epsilon: 1.0,
            accept_proportion: 0.01,
            pilot: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    #[serde(rename = "N")]
    pub n_proposals: usize,
    /// `bernoulli` or `threshold`.
    pub mode: String,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            n_proposals: 100_000,
            mode: "bernoulli".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProposalConfig {
    /// `prior`, `normal` (fixed mean and sd) or `gold` (reference
    /// posterior with inflation `c` and offset `offset_sd`).
    pub kind: String,
    pub mean: Vec<f64>,
    pub sd: f64,
    pub c: f64,
    pub offset_sd: f64,
}

impl Default for ProposalConfig {
    fn default() -> Self {
        ProposalConfig {
            kind: "prior".into(),
            mean: Vec::new(),
            sd: 1.0,
            c: 2.0,
            offset_sd: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegressionConfig {
    pub enabled: bool,
    pub use_weights: bool,
    pub kernel_weighted: bool,
    pub ridge: f64,
    pub max_condition: f64,
}

impl Default for RegressionConfig {
    fn default() -> Self {
        let d = RegressionOptions::default();
        RegressionConfig {
            enabled: true,
            use_weights: d.use_weights,
            kernel_weighted: d.kernel_weighted,
            ridge: d.ridge,
            max_condition: d.max_condition,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GoldConfig {
    pub proposals: usize,
    pub accept_proportion: f64,
    pub scaling: String,
    pub pilot: usize,
    pub refine_rounds: usize,
    pub refine_inflation: f64,
}

impl Default for GoldConfig {
    fn default() -> Self {
        let g = GoldProtocol::default();
        GoldConfig {
            proposals: g.proposals,
            accept_proportion: g.accept_proportion,
            scaling: g.scaling.as_str().into(),
            pilot: g.pilot,
            refine_rounds: g.refine_rounds,
            refine_inflation: g.refine_inflation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    /// `required_rate` or `regime`.
    pub kind: String,
    pub n_values: Vec<usize>,
    pub c_values: Vec<f64>,
    pub datasets: usize,
    pub replicates: usize,
    pub pool_size: usize,
    /// `"RE_mu:0.08"` style entries.
    pub targets: Vec<String>,
    pub q_grid: Vec<f64>,
    /// Summary scaling inside each study cell, estimated from its pool.
    pub scaling: String,
    /// Regime sweep: bandwidth `eps_scale * n^-rate` for each rate.
    pub eps_rates: Vec<f64>,
    pub eps_scale: f64,
    pub sigma_ratio: f64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        let f = RateStudyConfig::default();
        StudyConfig {
            kind: "required_rate".into(),
            n_values: f.n_values,
            c_values: f.c_values,
            datasets: f.datasets,
            replicates: f.replicates,
            pool_size: f.pool_size,
            targets: f
                .targets
                .iter()
                .map(|t| format!("{}:{}", t.metric.as_str(), t.value))
                .collect(),
            q_grid: default_q_grid(),
            scaling: f.scaling.as_str().into(),
            eps_rates: vec![0.4, 0.75],
            eps_scale: 1.0,
            sigma_ratio: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Divides every tolerance; values above 1 make the checks stricter.
    pub tighten: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { tighten: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub kernel: KernelConfig,
    pub sampler: SamplerConfig,
    pub proposal: ProposalConfig,
    pub regression: RegressionConfig,
    pub gold: GoldConfig,
    pub study: StudyConfig,
    pub verify: VerifyConfig,
    /// Observed dataset for `run`; simulated from `model.params` when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelConfig::default(),
            kernel: KernelConfig::default(),
            sampler: SamplerConfig::default(),
            proposal: ProposalConfig::default(),
            regression: RegressionConfig::default(),
            gold: GoldConfig::default(),
            study: StudyConfig::default(),
            verify: VerifyConfig::default(),
            data: None,
            seed: 1,
            output_dir: PathBuf::from("out"),
        }
    }
}

fn flatten(prefix: &str, value: &toml::Value, out: &mut Vec<(String, String)>) {
    match value {
        toml::Value::Table(t) => {
            for (k, v) in t {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, out);
            }
        }
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| AbcError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| AbcError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Every key as `dotted.key = value`, sorted by key.
    pub fn to_canonical(&self) -> String {
        let value = toml::Value::try_from(self).expect("configuration serialises to TOML");
        let mut pairs = Vec::new();
        flatten("", &value, &mut pairs);
        pairs.sort();
        let mut text = String::new();
        for (k, v) in pairs {
            text.push_str(&format!("{k} = {v}\n"));
        }
        text
    }

    /// First 16 hex digits of the SHA-256 of the canonical form, leaving
    /// out `output_dir`.
    pub fn hash(&self) -> String {
        let canonical = self.to_canonical();
        let identity: String = canonical
            .lines()
            .filter(|l| !l.starts_with("output_dir ="))
            .flat_map(|l| [l, "\n"])
            .collect();
        let digest = Sha256::digest(identity.as_bytes());
        hex::encode(&digest[..8])
    }

    /// Checks every enumerated field and numeric range.
    pub fn validate(&self) -> Result<()> {
        self.model_spec()?;
        self.kernel_family()?;
        self.scaling_rule()?;
        self.study.scaling.parse::<ScalingRule>()?;
        self.gold_protocol()?;
        self.sampler_mode()?;
        self.targets()?;
        let bad = |msg: &str| Err(AbcError::Config(msg.to_string()));
        if self.seed > i64::MAX as u64 {
            return bad("seed must be at most 2^63 - 1");
        }
        if self.sampler.n_proposals == 0 {
            return bad("sampler.N must be >= 1");
        }
        match self.kernel.bandwidth.as_str() {
            "proportion" => {
                let q = self.kernel.accept_proportion;
                if !(q > 0.0 && q <= 1.0) {
                    return bad("kernel.accept_proportion must lie in (0, 1]");
                }
            }
            "fixed" => {
                if !(self.kernel.epsilon > 0.0) {
                    return bad("kernel.epsilon must be > 0");
                }
            }
            _ => return bad("kernel.bandwidth must be proportion or fixed"),
        }
        match self.proposal.kind.as_str() {
            "prior" | "gold" => {}
            "normal" => {
                if self.proposal.mean.len() != self.model_spec()?.param_dim() {
                    return bad("proposal.mean must have one entry per parameter");
                }
                if !(self.proposal.sd > 0.0) {
                    return bad("proposal.sd must be > 0");
                }
            }
            _ => return bad("proposal.kind must be prior, normal or gold"),
        }
        if !(self.proposal.c > 0.0) {
            return bad("proposal.c must be > 0");
        }
        if !matches!(self.study.kind.as_str(), "required_rate" | "regime") {
            return bad("study.kind must be required_rate or regime");
        }
        if !(self.verify.tighten > 0.0) {
            return bad("verify.tighten must be > 0");
        }
        Ok(())
    }

    pub fn model_spec(&self) -> Result<ModelSpec> {
        let m = &self.model;
        let cfg = |e: AbcError| AbcError::Config(format!("model: {e}"));
        match m.name.as_str() {
            "gk" | "g-and-k" => {
                if m.params.len() != 4 {
                    return Err(AbcError::Config(
                        "model.params must have 4 entries for gk".into(),
                    ));
                }
                let prior = Prior::uniform_box(vec![m.prior_lower; 4], vec![m.prior_upper; 4])
                    .map_err(cfg)?;
                let mut gk = GkModel::new(m.n, m.summaries, prior).map_err(cfg)?;
                gk.fast_summaries = m.fast_summaries;
                Ok(ModelSpec::Gk(gk))
            }
            "gaussian" => {
                if m.params.len() != 1 {
                    return Err(AbcError::Config(
                        "model.params must have 1 entry for gaussian".into(),
                    ));
                }
                let mut g = GaussianOracle::new(m.prior_mean, m.prior_var, m.noise_var, m.n)
                    .map_err(cfg)?;
                g.sufficient_summary = m.fast_summaries;
                Ok(ModelSpec::Gaussian(g))
            }
            other => Err(AbcError::Config(format!("unknown model '{other}'"))),
        }
    }

    pub fn kernel_family(&self) -> Result<KernelFamily> {
        self.kernel
            .family
            .parse()
            .map_err(|e: AbcError| AbcError::Config(e.to_string()))
    }

    pub fn scaling_rule(&self) -> Result<ScalingRule> {
        self.kernel.scaling.parse()
    }

    pub fn sampler_mode(&self) -> Result<AcceptanceMode> {
        self.sampler
            .mode
            .parse()
            .map_err(|e: AbcError| AbcError::Config(e.to_string()))
    }

    pub fn regression_options(&self) -> RegressionOptions {
        RegressionOptions {
            use_weights: self.regression.use_weights,
            kernel_weighted: self.regression.kernel_weighted,
            ridge: self.regression.ridge,
            max_condition: self.regression.max_condition,
        }
    }

    pub fn gold_protocol(&self) -> Result<GoldProtocol> {
        let g = &self.gold;
        if g.proposals == 0 || !(g.accept_proportion > 0.0 && g.accept_proportion <= 1.0) {
            return Err(AbcError::Config(
                "gold.proposals >= 1 and gold.accept_proportion in (0, 1]".into(),
            ));
        }
        Ok(GoldProtocol {
            proposals: g.proposals,
            accept_proportion: g.accept_proportion,
            scaling: g.scaling.parse()?,
            pilot: g.pilot,
            refine_rounds: g.refine_rounds,
            refine_inflation: g.refine_inflation,
        })
    }

    pub fn targets(&self) -> Result<Vec<Target>> {
        self.study
            .targets
            .iter()
            .map(|t| {
                let (metric, value) = t
                    .split_once(':')
                    .ok_or_else(|| AbcError::Config(format!("target '{t}' is not metric:value")))?;
                let metric: TargetMetric = metric.trim().parse()?;
                let value: f64 = value
                    .trim()
                    .parse()
                    .map_err(|_| AbcError::Config(format!("target '{t}' has a bad value")))?;
                Ok(Target { metric, value })
            })
            .collect()
    }

    pub fn rate_study(&self) -> Result<RateStudyConfig> {
        Ok(RateStudyConfig {
            n_values: self.study.n_values.clone(),
            c_values: self.study.c_values.clone(),
            datasets: self.study.datasets,
            targets: self.targets()?,
            theta0: self.model.params.clone(),
            pool_size: self.study.pool_size,
            replicates: self.study.replicates,
            q_grid: self.study.q_grid.clone(),
            offset_sd: self.proposal.offset_sd,
            scaling: self.study.scaling.parse()?,
            gold: self.gold_protocol()?,
            regression: self.regression_options(),
            seed: self.seed,
            cache_dir: Some(self.output_dir.join("cells")),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
    }

    #[test]
    fn canonical_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.kernel.bandwidth = "fixed".into();
        cfg.kernel.epsilon = 0.1;
        cfg.model.name = "gaussian".into();
        cfg.model.params = vec![0.25];
        cfg.data = Some(PathBuf::from("data/obs.txt"));
        let text = cfg.to_canonical();
        assert!(text.contains("sampler.N = 100000\n"));
        let back = RunConfig::parse(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
        assert_eq!(cfg.hash().len(), 16);
        cfg.output_dir = PathBuf::from("elsewhere");
        assert_eq!(back.hash(), cfg.hash());
        cfg.seed += 1;
        assert_ne!(back.hash(), cfg.hash());
    }

    #[test]
    fn config_errors() {
        for text in [
            "model.name = \"nope\"",
            "kernel.family = \"box\"",
            "sampler.mode = \"maybe\"",
            "sampler.N = 0",
            "typo = 1",
            "kernel.accept_proportion = 2.0",
            "study.targets = [\"RE_mu\"]",
            "model.params = [1.0]",
        ] {
            assert!(
                matches!(RunConfig::parse(text), Err(AbcError::Config(_))),
                "{text}"
            );
        }
    }
}
