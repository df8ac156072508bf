use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{AbcError, Result};
use crate::normal;

/// Prior distribution over the parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub enum Prior {
    /// Independent uniforms on `[lower_k, upper_k]`.
    UniformBox { lower: Vec<f64>, upper: Vec<f64> },
    /// Independent normals with the given means and variances.
    Gaussian { mean: Vec<f64>, var: Vec<f64> },
}

impl Prior {
    pub fn uniform_box(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(AbcError::Dimension {
                context: "uniform prior bounds",
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower
            .iter()
            .zip(&upper)
            .any(|(l, u)| !(l < u) || !l.is_finite() || !u.is_finite())
        {
            return Err(AbcError::InvalidParameter(
                "uniform prior needs finite bounds with lower < upper".into(),
            ));
        }
        Ok(Prior::UniformBox { lower, upper })
    }

    pub fn gaussian(mean: Vec<f64>, var: Vec<f64>) -> Result<Self> {
        if mean.len() != var.len() {
            return Err(AbcError::Dimension {
                context: "gaussian prior",
                expected: mean.len(),
                got: var.len(),
            });
        }
        if var.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(AbcError::InvalidParameter(
                "prior variance must be positive".into(),
            ));
        }
        Ok(Prior::Gaussian { mean, var })
    }

    pub fn dim(&self) -> usize {
        match self {
            Prior::UniformBox { lower, .. } => lower.len(),
            Prior::Gaussian { mean, .. } => mean.len(),
        }
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        match self {
            Prior::UniformBox { lower, upper } => theta
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(t, (l, u))| l <= t && t <= u),
            Prior::Gaussian { .. } => theta.iter().all(|t| t.is_finite()),
        }
    }

    pub fn density(&self, theta: &[f64]) -> f64 {
        match self {
            Prior::UniformBox { lower, upper } => {
                if self.contains(theta) {
                    lower
                        .iter()
                        .zip(upper)
                        .map(|(l, u)| 1.0 / (u - l))
                        .product()
                } else {
                    0.0
                }
            }
            Prior::Gaussian { mean, var } => theta
                .iter()
                .zip(mean.iter().zip(var))
                .map(|(t, (m, v))| normal::pdf((t - m) / v.sqrt()) / v.sqrt())
                .product(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            Prior::UniformBox { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(l, u)| l + (u - l) * rng.random::<f64>())
                .collect(),
            Prior::Gaussian { mean, var } => mean
                .iter()
                .zip(var)
                .map(|(m, v)| m + v.sqrt() * rng.sample::<f64, _>(StandardNormal))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    fn gk_box() -> Prior {
        Prior::uniform_box(vec![0.0; 4], vec![10.0; 4]).unwrap()
    }

    #[test]
    fn box_density() {
        let p = gk_box();
        assert!((p.density(&[3.0, 1.0, 2.0, 0.5]) - 1e-4).abs() < 1e-18);
        assert_eq!(p.density(&[11.0, 0.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn box_sample_means() {
        let p = gk_box();
        let mut rng = rng_from_seed(5);
        let m = 1_000_000;
        let mut sums = [0.0; 4];
        for _ in 0..m {
            for (s, v) in sums.iter_mut().zip(p.sample(&mut rng)) {
                *s += v;
            }
        }
        for s in sums {
            assert!((s / m as f64 - 5.0).abs() < 0.02);
        }
    }

    #[test]
    fn gaussian_density_normalised() {
        let p = Prior::gaussian(vec![0.5], vec![2.0]).unwrap();
        let h = 1e-3;
        let total: f64 = (-20_000..20_000)
            .map(|i| p.density(&[0.5 + i as f64 * h]) * h)
            .sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_bounds() {
        assert!(Prior::uniform_box(vec![1.0], vec![0.0]).is_err());
        assert!(Prior::gaussian(vec![0.0], vec![0.0]).is_err());
    }
}
