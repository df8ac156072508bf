//! Simulator models, priors and summary-statistic maps.

mod gaussian;
mod gk;
mod prior;
mod summary;

pub use gaussian::{gaussian_sample, GaussianOracle};
pub use gk::{gk_quantile, gk_sample, gk_transform, GkModel, GkParams};
pub use prior::Prior;
pub use summary::{quantile_levels, quantile_summaries, type7_quantile};

use std::ops::Deref;

use crate::error::{AbcError, Result};

macro_rules! real_vector {
    ($name:ident, $what:literal) => {
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name(Vec<f64>);

        impl $name {
            /// Fails if any entry is non-finite.
            pub fn new(values: Vec<f64>) -> Result<Self> {
                if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
                    return Err(AbcError::Domain {
                        what: $what,
                        value: bad,
                    });
                }
                Ok(Self(values))
            }

            pub fn with_dim(values: Vec<f64>, dim: usize) -> Result<Self> {
                if values.len() != dim {
                    return Err(AbcError::Dimension {
                        context: $what,
                        expected: dim,
                        got: values.len(),
                    });
                }
                Self::new(values)
            }

            #[allow(dead_code)]
            pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
                Self(values)
            }

            pub fn into_inner(self) -> Vec<f64> {
                self.0
            }
        }

        impl Deref for $name {
            type Target = [f64];
            fn deref(&self) -> &[f64] {
                &self.0
            }
        }

        impl From<$name> for Vec<f64> {
            fn from(v: $name) -> Vec<f64> {
                v.0
            }
        }
    };
}

real_vector!(ParamVec, "parameter vector");
real_vector!(SummaryVec, "summary vector");

/// A generative model: a prior, a simulator and a summary map.
///
/// Simulation is a pure function of `(theta, seed)`.
pub trait Model: Sync {
    fn name(&self) -> &'static str;
    /// Parameter dimension `p`.
    fn param_dim(&self) -> usize;
    /// Summary dimension `d`.
    fn summary_dim(&self) -> usize;
    /// Observations per dataset `n`.
    fn sample_size(&self) -> usize;
    fn prior(&self) -> &Prior;

    /// Whether `theta` lies where the simulator is defined.
    fn is_valid(&self, theta: &[f64]) -> bool;

    fn simulate(&self, theta: &[f64], seed: u64) -> Result<Vec<f64>>;

    fn summarize(&self, data: &[f64]) -> Result<SummaryVec>;

    /// Summary of a fresh dataset. Models may override this with a path
    /// that skips materialising the dataset, provided the result has the
    /// same distribution.
    fn simulate_summary(&self, theta: &[f64], seed: u64) -> Result<SummaryVec> {
        let data = self.simulate(theta, seed)?;
        self.summarize(&data)
    }
}

/// The built-in models, selectable by name.
#[derive(Debug, Clone)]
pub enum ModelSpec {
    Gk(GkModel),
    Gaussian(GaussianOracle),
}

impl ModelSpec {
    /// The same model with a different dataset size.
    pub fn with_sample_size(&self, n: usize) -> Self {
        match self {
            ModelSpec::Gk(m) => ModelSpec::Gk(m.with_sample_size(n)),
            ModelSpec::Gaussian(m) => ModelSpec::Gaussian(m.with_sample_size(n)),
        }
    }

    fn inner(&self) -> &dyn Model {
        match self {
            ModelSpec::Gk(m) => m,
            ModelSpec::Gaussian(m) => m,
        }
    }
}

impl Model for ModelSpec {
    fn name(&self) -> &'static str {
        self.inner().name()
    }
    fn param_dim(&self) -> usize {
        self.inner().param_dim()
    }
    fn summary_dim(&self) -> usize {
        self.inner().summary_dim()
    }
    fn sample_size(&self) -> usize {
        self.inner().sample_size()
    }
    fn prior(&self) -> &Prior {
        self.inner().prior()
    }
    fn is_valid(&self, theta: &[f64]) -> bool {
        self.inner().is_valid(theta)
    }
    fn simulate(&self, theta: &[f64], seed: u64) -> Result<Vec<f64>> {
        self.inner().simulate(theta, seed)
    }
    fn summarize(&self, data: &[f64]) -> Result<SummaryVec> {
        self.inner().summarize(data)
    }
    fn simulate_summary(&self, theta: &[f64], seed: u64) -> Result<SummaryVec> {
        self.inner().simulate_summary(theta, seed)
    }
}
