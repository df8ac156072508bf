use std::str::FromStr;

use rand::{Rng, RngCore};
use rayon::prelude::*;

use super::ProposalSpec;
use crate::error::{AbcError, Result};
use crate::kernels::{bandwidth_from_proportion, KernelSpec, Scaling};
use crate::models::Model;
use crate::rng::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcceptanceMode {
    /// Accept with probability `K(v)`.
    Bernoulli,
    /// Accept iff `||v||_Lambda <= 1`, i.e. a uniform kernel.
    Threshold,
}

impl AcceptanceMode {
    pub fn as_str(self) -> &'static str {
        match self {
            AcceptanceMode::Bernoulli => "bernoulli",
            AcceptanceMode::Threshold => "threshold",
        }
    }
}

impl FromStr for AcceptanceMode {
    type Err = AbcError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bernoulli" => Ok(AcceptanceMode::Bernoulli),
            "threshold" => Ok(AcceptanceMode::Threshold),
            other => Err(AbcError::Config(format!("unknown sampler mode `{other}`"))),
        }
    }
}

/// One proposal and its fate.
#[derive(Debug, Clone, PartialEq)]
pub struct AbcDraw {
    pub index: usize,
    pub theta: Vec<f64>,
    pub s: Vec<f64>,
    /// `||s - s_obs||_Lambda`, before dividing by the bandwidth.
    pub distance: f64,
    pub kernel_value: f64,
    pub weight: f64,
    pub accepted: bool,
}

/// Accepted draws of one run together with its bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct AbcRun {
    pub draws: Vec<AbcDraw>,
    pub n_proposed: usize,
    pub p_acc_hat: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub mode: AcceptanceMode,
}

impl AbcRun {
    pub fn n_accepted(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn thetas(&self) -> Vec<Vec<f64>> {
        self.draws.iter().map(|d| d.theta.clone()).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.draws.iter().map(|d| d.weight).collect()
    }

    /// Turns an empty run into an error.
    pub fn require_nonempty(self) -> Result<Self> {
        if self.draws.is_empty() {
            Err(AbcError::ZeroAcceptances {
                proposed: self.n_proposed,
            })
        } else {
            Ok(self)
        }
    }
}

struct Proposed {
    theta: Vec<f64>,
    s: Option<Vec<f64>>,
    uniform: f64,
    weight: f64,
}

fn propose<M: Model + ?Sized>(
    model: &M,
    proposal: &ProposalSpec,
    seed: u64,
    index: usize,
) -> Result<Proposed> {
    let mut rng = rng_from_seed(derive_seed(seed, index as u64));
    let theta = proposal.sample(model.prior(), &mut rng);
    let sim_seed = rng.next_u64();
    let uniform: f64 = rng.random();
    let weight = proposal.weight(model.prior(), &theta);
    // Outside the prior support the joint density vanishes: nothing to
    // simulate, never accepted.
    let s = if weight > 0.0 && model.is_valid(&theta) {
        Some(model.simulate_summary(&theta, sim_seed)?.into_inner())
    } else {
        None
    };
    Ok(Proposed {
        theta,
        s,
        uniform,
        weight,
    })
}

/// All `N` simulated proposals of a run, kept so that acceptance can be
/// re-decided for many bandwidths without re-simulating.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationPool {
    p: usize,
    d: usize,
    seed: u64,
    thetas: Vec<f64>,
    summaries: Vec<f64>,
    uniforms: Vec<f64>,
    weights: Vec<f64>,
    simulated: Vec<bool>,
}

impl SimulationPool {
    pub fn simulate<M: Model + ?Sized>(
        model: &M,
        proposal: &ProposalSpec,
        n: usize,
        seed: u64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(AbcError::InvalidParameter(
                "number of proposals must be >= 1".into(),
            ));
        }
        let (p, d) = (model.param_dim(), model.summary_dim());
        let proposed: Vec<Proposed> = (0..n)
            .into_par_iter()
            .map(|i| propose(model, proposal, seed, i))
            .collect::<Result<_>>()?;
        let mut pool = SimulationPool {
            p,
            d,
            seed,
            thetas: Vec::with_capacity(n * p),
            summaries: Vec::with_capacity(n * d),
            uniforms: Vec::with_capacity(n),
            weights: Vec::with_capacity(n),
            simulated: Vec::with_capacity(n),
        };
        for prop in proposed {
            pool.thetas.extend_from_slice(&prop.theta);
            match prop.s {
                Some(s) => {
                    pool.summaries.extend_from_slice(&s);
                    pool.simulated.push(true);
                }
                None => {
                    pool.summaries.extend(std::iter::repeat_n(f64::NAN, d));
                    pool.simulated.push(false);
                }
            }
            pool.uniforms.push(prop.uniform);
            pool.weights.push(prop.weight);
        }
        Ok(pool)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn param_dim(&self) -> usize {
        self.p
    }

    pub fn summary_dim(&self) -> usize {
        self.d
    }

    pub fn theta(&self, i: usize) -> &[f64] {
        &self.thetas[i * self.p..(i + 1) * self.p]
    }

    /// Simulated summary, `None` for proposals outside the prior support.
    pub fn summary(&self, i: usize) -> Option<&[f64]> {
        self.simulated[i].then(|| &self.summaries[i * self.d..(i + 1) * self.d])
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    /// Simulated summaries, skipping unsimulated proposals.
    pub fn summaries(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.len()).filter_map(move |i| self.summary(i))
    }

    /// `||s_i - s_obs||_Lambda` per proposal; `+inf` where nothing was simulated.
    pub fn distances(&self, scaling: &Scaling, s_obs: &[f64]) -> Result<Vec<f64>> {
        if s_obs.len() != self.d {
            return Err(AbcError::Dimension {
                context: "observed summary",
                expected: self.d,
                got: s_obs.len(),
            });
        }
        if let Some(s) = self.summaries().next() {
            scaling.distance(s, s_obs)?;
        }
        Ok((0..self.len())
            .map(|i| match self.summary(i) {
                Some(s) => scaling.distance_unchecked(s, s_obs),
                None => f64::INFINITY,
            })
            .collect())
    }

    fn decide(
        &self,
        i: usize,
        distance: f64,
        kernel: &KernelSpec,
        mode: AcceptanceMode,
    ) -> (f64, bool) {
        if !distance.is_finite() {
            return (0.0, false);
        }
        match mode {
            AcceptanceMode::Bernoulli => {
                let k = kernel.weight_at_distance(distance);
                (k, k > 0.0 && self.uniforms[i] < k)
            }
            AcceptanceMode::Threshold => {
                let inside = distance <= kernel.epsilon();
                (if inside { 1.0 } else { 0.0 }, inside)
            }
        }
    }

    fn draw(&self, i: usize, distance: f64, kernel_value: f64, accepted: bool) -> AbcDraw {
        AbcDraw {
            index: i,
            theta: self.theta(i).to_vec(),
            s: self
                .summary(i)
                .map(<[f64]>::to_vec)
                .unwrap_or_else(|| vec![f64::NAN; self.d]),
            distance,
            kernel_value,
            weight: self.weights[i],
            accepted,
        }
    }

    /// Acceptance decisions given precomputed distances.
    pub fn accept_with_distances(
        &self,
        distances: &[f64],
        kernel: &KernelSpec,
        mode: AcceptanceMode,
    ) -> AbcRun {
        let draws: Vec<AbcDraw> = distances
            .iter()
            .enumerate()
            .filter_map(|(i, &dist)| {
                let (k, acc) = self.decide(i, dist, kernel, mode);
                acc.then(|| self.draw(i, dist, k, true))
            })
            .collect();
        AbcRun {
            p_acc_hat: draws.len() as f64 / self.len() as f64,
            draws,
            n_proposed: self.len(),
            epsilon: kernel.epsilon(),
            seed: self.seed,
            mode,
        }
    }

    pub fn accept(
        &self,
        kernel: &KernelSpec,
        s_obs: &[f64],
        mode: AcceptanceMode,
    ) -> Result<AbcRun> {
        let distances = self.distances(&kernel.scaling, s_obs)?;
        Ok(self.accept_with_distances(&distances, kernel, mode))
    }

    /// Every proposal with its acceptance decision, for export.
    pub fn all_draws(
        &self,
        distances: &[f64],
        kernel: &KernelSpec,
        mode: AcceptanceMode,
    ) -> Vec<AbcDraw> {
        distances
            .iter()
            .enumerate()
            .map(|(i, &dist)| {
                let (k, acc) = self.decide(i, dist, kernel, mode);
                self.draw(i, dist, k, acc)
            })
            .collect()
    }
}

/// Rejection / importance-sampling ABC with `n` proposals.
pub fn run_rejection<M: Model + ?Sized>(
    model: &M,
    s_obs: &[f64],
    kernel: &KernelSpec,
    proposal: &ProposalSpec,
    n: usize,
    mode: AcceptanceMode,
    seed: u64,
) -> Result<AbcRun> {
    SimulationPool::simulate(model, proposal, n, seed)?.accept(kernel, s_obs, mode)
}

/// Threshold ABC whose bandwidth accepts proportion `q` of `n` proposals.
///
/// Only distances are held during the first pass; accepted draws are then
/// re-simulated from their per-index seeds, so memory stays `O(n)` scalars
/// regardless of the summary dimension.
pub fn run_threshold_by_proportion<M: Model + ?Sized>(
    model: &M,
    s_obs: &[f64],
    scaling: &Scaling,
    proposal: &ProposalSpec,
    n: usize,
    q: f64,
    seed: u64,
) -> Result<AbcRun> {
    if n == 0 {
        return Err(AbcError::InvalidParameter(
            "number of proposals must be >= 1".into(),
        ));
    }
    if s_obs.len() != model.summary_dim() {
        return Err(AbcError::Dimension {
            context: "observed summary",
            expected: model.summary_dim(),
            got: s_obs.len(),
        });
    }
    let distances: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let prop = propose(model, proposal, seed, i)?;
            Ok(match prop.s {
                Some(s) => scaling.distance(&s, s_obs)?,
                None => f64::INFINITY,
            })
        })
        .collect::<Result<_>>()?;
    let epsilon = bandwidth_from_proportion(&distances, q)?;
    if !epsilon.is_finite() {
        return Err(AbcError::ZeroAcceptances { proposed: n });
    }
    let kept: Vec<usize> = (0..n).filter(|&i| distances[i] <= epsilon).collect();
    let draws: Vec<AbcDraw> = kept
        .into_par_iter()
        .map(|i| {
            let prop = propose(model, proposal, seed, i)?;
            Ok(AbcDraw {
                index: i,
                theta: prop.theta,
                s: prop.s.expect("accepted draws were simulated"),
                distance: distances[i],
                kernel_value: 1.0,
                weight: prop.weight,
                accepted: true,
            })
        })
        .collect::<Result<_>>()?;
    Ok(AbcRun {
        p_acc_hat: draws.len() as f64 / n as f64,
        draws,
        n_proposed: n,
        epsilon: epsilon.max(f64::MIN_POSITIVE),
        seed,
        mode: AcceptanceMode::Threshold,
    })
}

/// Proposes in index order until `target` draws are accepted (Bernoulli
/// mode), returning the first `target` of them.
pub fn sample_accepted<M: Model + ?Sized>(
    model: &M,
    s_obs: &[f64],
    kernel: &KernelSpec,
    proposal: &ProposalSpec,
    target: usize,
    max_proposals: usize,
    seed: u64,
) -> Result<AbcRun> {
    const BATCH: usize = 8192;
    let mut draws = Vec::with_capacity(target);
    let mut next = 0usize;
    while draws.len() < target && next < max_proposals {
        let end = (next + BATCH).min(max_proposals);
        let batch: Vec<Option<AbcDraw>> = (next..end)
            .into_par_iter()
            .map(|i| {
                let prop = propose(model, proposal, seed, i)?;
                let Some(s) = prop.s else { return Ok(None) };
                let distance = kernel.scaling.distance(&s, s_obs)?;
                let k = kernel.weight_at_distance(distance);
                Ok((k > 0.0 && prop.uniform < k).then_some(AbcDraw {
                    index: i,
                    theta: prop.theta,
                    s,
                    distance,
                    kernel_value: k,
                    weight: prop.weight,
                    accepted: true,
                }))
            })
            .collect::<Result<_>>()?;
        for d in batch.into_iter().flatten() {
            if draws.len() == target {
                break;
            }
            draws.push(d);
        }
        next = end;
    }
    if draws.len() < target {
        return Err(AbcError::InsufficientSample {
            needed: target,
            have: draws.len(),
        });
    }
    let n_proposed = draws.last().map_or(next, |d| d.index + 1);
    Ok(AbcRun {
        p_acc_hat: draws.len() as f64 / n_proposed as f64,
        draws,
        n_proposed,
        epsilon: kernel.epsilon(),
        seed,
        mode: AcceptanceMode::Bernoulli,
    })
}
