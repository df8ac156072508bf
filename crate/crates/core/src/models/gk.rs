//! The g-and-k distribution, defined through its quantile function
//!
//! ```text
//! Q(x) = a + b [1 + 0.8 (1 - e^{-g z}) / (1 + e^{-g z})] (1 + z^2)^k z,   z = Phi^{-1}(x)
//! ```
//!
//! The skewness factor lies in `(0.2, 1.8)`, so `b > 0` and `k > -1/2` keep
//! `Q` strictly increasing.

use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use super::summary::{quantile_levels, quantile_summaries, type7_position};
use super::{Model, Prior, SummaryVec};
use crate::error::{AbcError, Result};
use crate::normal;
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GkParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub kappa: f64,
}

impl GkParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, kappa: f64) -> Result<Self> {
        let p = GkParams {
            alpha,
            beta,
            gamma,
            kappa,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn from_slice(theta: &[f64]) -> Result<Self> {
        match *theta {
            [a, b, g, k] => Self::new(a, b, g, k),
            _ => Err(AbcError::Dimension {
                context: "g-and-k parameters",
                expected: 4,
                got: theta.len(),
            }),
        }
    }

    pub fn to_vec(self) -> Vec<f64> {
        vec![self.alpha, self.beta, self.gamma, self.kappa]
    }

    fn validate(&self) -> Result<()> {
        let finite = [self.alpha, self.beta, self.gamma, self.kappa]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(AbcError::InvalidParameter(
                "g-and-k parameters must be finite".into(),
            ));
        }
        if self.beta <= 0.0 {
            return Err(AbcError::InvalidParameter(format!(
                "g-and-k scale must be positive, got {}",
                self.beta
            )));
        }
        if self.kappa <= -0.5 {
            return Err(AbcError::InvalidParameter(format!(
                "g-and-k kurtosis parameter must exceed -0.5, got {}",
                self.kappa
            )));
        }
        Ok(())
    }
}

/// `Q` as a function of the standard normal quantile `z`.
#[inline]
pub fn gk_transform(z: f64, p: &GkParams) -> f64 {
    // (1 - e^{-x}) / (1 + e^{-x}) = tanh(x / 2), without overflow for large |x|.
    let skew = 1.0 + 0.8 * (0.5 * p.gamma * z).tanh();
    let tails = if p.kappa == 0.0 {
        1.0
    } else {
        (1.0 + z * z).powf(p.kappa)
    };
    p.alpha + p.beta * skew * tails * z
}

/// The g-and-k quantile function at probability `x`.
pub fn gk_quantile(x: f64, params: &GkParams) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(AbcError::Domain {
            what: "g-and-k quantile level (0, 1)",
            value: x,
        });
    }
    Ok(gk_transform(normal::quantile(x), params))
}

/// `n` i.i.d. draws obtained by pushing standard normal variates through `Q`.
pub fn gk_sample(n: usize, params: &GkParams, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    (0..n)
        .map(|_| gk_transform(rng.sample(StandardNormal), params))
        .collect()
}

/// g-and-k simulator with evenly spaced quantile summaries.
#[derive(Debug, Clone)]
pub struct GkModel {
    n: usize,
    d: usize,
    prior: Prior,
    /// Draw summaries through the order-statistic shortcut instead of
    /// simulating the whole dataset.
    pub fast_summaries: bool,
    plan: Arc<OrderStatPlan>,
}

impl GkModel {
    pub fn new(n: usize, d: usize, prior: Prior) -> Result<Self> {
        if n == 0 || d == 0 || d > n {
            return Err(AbcError::InvalidParameter(format!(
                "g-and-k model needs 1 <= d <= n, got n={n}, d={d}"
            )));
        }
        if prior.dim() != 4 {
            return Err(AbcError::Dimension {
                context: "g-and-k prior",
                expected: 4,
                got: prior.dim(),
            });
        }
        Ok(GkModel {
            n,
            d,
            prior,
            fast_summaries: true,
            plan: Arc::new(OrderStatPlan::new(n, d)),
        })
    }

    /// Uniform prior on `[0, 10]^4` with 19 quantile summaries.
    pub fn standard(n: usize) -> Self {
        let prior = Prior::uniform_box(vec![0.0; 4], vec![10.0; 4]).expect("valid box");
        Self::new(n, 19, prior).expect("n >= 19")
    }

    pub fn with_sample_size(&self, n: usize) -> Self {
        let mut m = Self::new(n, self.d, self.prior.clone()).expect("valid model");
        m.fast_summaries = self.fast_summaries;
        m
    }

    fn summary_from_order_stats(&self, params: &GkParams, seed: u64) -> SummaryVec {
        let mut rng = rng_from_seed(seed);
        let z = self.plan.normal_order_stats(&mut rng);
        let x: Vec<f64> = z.iter().map(|&z| gk_transform(z, params)).collect();
        let values = self
            .plan
            .levels
            .iter()
            .map(|&(lo, hi, frac)| x[lo] + frac * (x[hi] - x[lo]))
            .collect();
        SummaryVec::from_vec_unchecked(values)
    }
}

impl Model for GkModel {
    fn name(&self) -> &'static str {
        "gk"
    }
    fn param_dim(&self) -> usize {
        4
    }
    fn summary_dim(&self) -> usize {
        self.d
    }
    fn sample_size(&self) -> usize {
        self.n
    }
    fn prior(&self) -> &Prior {
        &self.prior
    }
    fn is_valid(&self, theta: &[f64]) -> bool {
        GkParams::from_slice(theta).is_ok()
    }
    fn simulate(&self, theta: &[f64], seed: u64) -> Result<Vec<f64>> {
        let params = GkParams::from_slice(theta)?;
        Ok(gk_sample(self.n, &params, seed))
    }
    fn summarize(&self, data: &[f64]) -> Result<SummaryVec> {
        quantile_summaries(data, self.d)
    }
    fn simulate_summary(&self, theta: &[f64], seed: u64) -> Result<SummaryVec> {
        let params = GkParams::from_slice(theta)?;
        if self.fast_summaries {
            Ok(self.summary_from_order_stats(&params, seed))
        } else {
            self.summarize(&gk_sample(self.n, &params, seed))
        }
    }
}

/// Joint sampler for the handful of normal order statistics that the
/// type-7 quantile summaries touch.
///
/// Uniform order statistics are ratios of partial sums of unit exponentials,
/// `U_(r) = S_r / S_{n+1}`, so only the gaps between the needed ranks have to
/// be drawn, each as a Gamma variate. Because `Q` is increasing, the order
/// statistics of a g-and-k sample are `Q` applied to these.
#[derive(Debug)]
struct OrderStatPlan {
    /// Gamma laws of the gaps before each needed rank, then the tail gap.
    gaps: Vec<Gamma<f64>>,
    /// For each quantile level: positions into the needed-rank list and the
    /// interpolation weight.
    levels: Vec<(usize, usize, f64)>,
}

impl OrderStatPlan {
    fn new(n: usize, d: usize) -> Self {
        let positions: Vec<(usize, usize, f64)> = quantile_levels(d)
            .into_iter()
            .map(|level| type7_position(n, level))
            .collect();
        let mut ranks: Vec<usize> = positions.iter().flat_map(|&(lo, hi, _)| [lo, hi]).collect();
        ranks.sort_unstable();
        ranks.dedup();
        let index_of = |r: usize| ranks.binary_search(&r).expect("rank present");
        let levels = positions
            .iter()
            .map(|&(lo, hi, frac)| (index_of(lo), index_of(hi), frac))
            .collect();

        let mut gaps = Vec::with_capacity(ranks.len() + 1);
        let mut prev: Option<usize> = None;
        for &r in &ranks {
            let shape = match prev {
                None => r + 1,
                Some(p) => r - p,
            };
            gaps.push(Gamma::new(shape as f64, 1.0).expect("positive shape"));
            prev = Some(r);
        }
        let tail = n - ranks.last().copied().unwrap_or(0);
        gaps.push(Gamma::new(tail as f64, 1.0).expect("positive shape"));
        OrderStatPlan { gaps, levels }
    }

    fn normal_order_stats<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let k = self.gaps.len() - 1;
        let mut partial = Vec::with_capacity(k);
        let mut acc = 0.0;
        for g in &self.gaps[..k] {
            acc += g.sample(rng);
            partial.push(acc);
        }
        let total = acc + self.gaps[k].sample(rng);
        partial
            .into_iter()
            .map(|s| {
                let lower = s / total;
                if lower <= 0.5 {
                    normal::quantile(lower)
                } else {
                    normal::quantile_upper((total - s) / total)
                }
            })
            .collect()
    }
}
