//! Acceptance kernels.
//!
//! A kernel is a radial profile of the scaled distance `||v||_Lambda`,
//! normalised so that its maximum, at the origin, is 1. The value is used
//! directly as an acceptance probability.

use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{AbcError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    /// `exp(-r^2 / 2)`
    Gaussian,
    /// `1{r <= 1}`
    Uniform,
    /// `max(0, 1 - r^2)`
    Epanechnikov,
}

impl KernelFamily {
    /// Kernel value at scaled radius `r >= 0`.
    #[inline]
    pub fn at_radius(self, r: f64) -> f64 {
        match self {
            KernelFamily::Gaussian => (-0.5 * r * r).exp(),
            KernelFamily::Uniform => {
                if r <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            KernelFamily::Epanechnikov => (1.0 - r * r).max(0.0),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            KernelFamily::Gaussian => "gaussian",
            KernelFamily::Uniform => "uniform",
            KernelFamily::Epanechnikov => "epanechnikov",
        }
    }
}

impl FromStr for KernelFamily {
    type Err = AbcError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(KernelFamily::Gaussian),
            "uniform" => Ok(KernelFamily::Uniform),
            "epanechnikov" => Ok(KernelFamily::Epanechnikov),
            other => Err(AbcError::Config(format!("unknown kernel family `{other}`"))),
        }
    }
}

/// The positive-definite matrix `Lambda` in `||v||^2_Lambda = v^T Lambda v`.
#[derive(Debug, Clone, PartialEq)]
pub enum Scaling {
    Identity,
    Diagonal(Vec<f64>),
    Full(DMatrix<f64>),
}

impl Scaling {
    pub fn diagonal(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(AbcError::NotPositiveDefinite("diagonal scaling"));
        }
        Ok(Scaling::Diagonal(weights))
    }

    pub fn full(lambda: DMatrix<f64>) -> Result<Self> {
        if !lambda.is_square() {
            return Err(AbcError::NotPositiveDefinite(
                "scaling matrix is not square",
            ));
        }
        let sym = (&lambda - lambda.transpose()).abs().max();
        if sym > 1e-12 * lambda.abs().max().max(1.0) {
            return Err(AbcError::NotPositiveDefinite(
                "scaling matrix is not symmetric",
            ));
        }
        if lambda.clone().cholesky().is_none() {
            return Err(AbcError::NotPositiveDefinite("scaling matrix"));
        }
        Ok(Scaling::Full(lambda))
    }

    /// Coordinate standardisation: each summary is divided by its spread
    /// across `summaries` (rows of a pilot sample).
    pub fn standardized<'a>(summaries: impl Iterator<Item = &'a [f64]>, d: usize) -> Result<Self> {
        let mut count = 0usize;
        let mut mean = vec![0.0; d];
        let mut m2 = vec![0.0; d];
        for s in summaries {
            count += 1;
            for k in 0..d {
                let delta = s[k] - mean[k];
                mean[k] += delta / count as f64;
                m2[k] += delta * (s[k] - mean[k]);
            }
        }
        if count < 2 {
            return Err(AbcError::InsufficientSample {
                needed: 2,
                have: count,
            });
        }
        let weights = m2
            .into_iter()
            .map(|m| {
                let var = m / (count - 1) as f64;
                if var > 0.0 {
                    1.0 / var
                } else {
                    1.0
                }
            })
            .collect();
        Scaling::diagonal(weights)
    }

    /// Like [`Scaling::standardized`] with the median absolute deviation
    /// (times 1.4826) as the spread.
    pub fn robust<'a>(summaries: impl Iterator<Item = &'a [f64]>, d: usize) -> Result<Self> {
        let mut cols: Vec<Vec<f64>> = vec![Vec::new(); d];
        for s in summaries {
            for k in 0..d {
                cols[k].push(s[k]);
            }
        }
        if cols.first().map_or(0, Vec::len) < 2 {
            return Err(AbcError::InsufficientSample {
                needed: 2,
                have: cols.first().map_or(0, Vec::len),
            });
        }
        let median = |v: &mut Vec<f64>| {
            let m = v.len() / 2;
            let (_, x, _) = v.select_nth_unstable_by(m, f64::total_cmp);
            *x
        };
        let weights = cols
            .into_iter()
            .map(|mut c| {
                let med = median(&mut c);
                let mut dev: Vec<f64> = c.iter().map(|x| (x - med).abs()).collect();
                let mad = 1.4826 * median(&mut dev);
                if mad > 0.0 && mad.is_finite() {
                    1.0 / (mad * mad)
                } else {
                    1.0
                }
            })
            .collect();
        Scaling::diagonal(weights)
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        let expected = match self {
            Scaling::Identity => return Ok(()),
            Scaling::Diagonal(w) => w.len(),
            Scaling::Full(m) => m.nrows(),
        };
        if expected != d {
            return Err(AbcError::Dimension {
                context: "kernel scaling",
                expected,
                got: d,
            });
        }
        Ok(())
    }

    /// `v^T Lambda v`. Dimensions must already match.
    #[inline]
    pub fn norm_sq(&self, v: &[f64]) -> f64 {
        match self {
            Scaling::Identity => v.iter().map(|x| x * x).sum(),
            Scaling::Diagonal(w) => v.iter().zip(w).map(|(x, w)| w * x * x).sum(),
            Scaling::Full(m) => {
                let v = DVector::from_column_slice(v);
                (v.transpose() * m * &v)[(0, 0)]
            }
        }
    }

    /// `||s - s_obs||_Lambda` without the bandwidth.
    pub fn distance(&self, s: &[f64], s_obs: &[f64]) -> Result<f64> {
        if s.len() != s_obs.len() {
            return Err(AbcError::Dimension {
                context: "summary difference",
                expected: s_obs.len(),
                got: s.len(),
            });
        }
        self.check_dim(s.len())?;
        Ok(self.distance_unchecked(s, s_obs))
    }

    #[inline]
    pub(crate) fn distance_unchecked(&self, s: &[f64], s_obs: &[f64]) -> f64 {
        match self {
            Scaling::Identity => s
                .iter()
                .zip(s_obs)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt(),
            Scaling::Diagonal(w) => s
                .iter()
                .zip(s_obs)
                .zip(w)
                .map(|((a, b), w)| w * (a - b) * (a - b))
                .sum::<f64>()
                .sqrt(),
            Scaling::Full(_) => {
                let v: Vec<f64> = s.iter().zip(s_obs).map(|(a, b)| a - b).collect();
                self.norm_sq(&v).max(0.0).sqrt()
            }
        }
    }
}

/// How a diagonal scaling is estimated from a pilot set of summaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScalingRule {
    #[default]
    Identity,
    /// Inverse sample variance per coordinate.
    Variance,
    /// Inverse squared MAD per coordinate (normal-consistent), insensitive
    /// to heavy-tailed pilot summaries.
    Mad,
}

impl ScalingRule {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalingRule::Identity => "identity",
            ScalingRule::Variance => "variance",
            ScalingRule::Mad => "mad",
        }
    }

    pub fn fit<'a>(self, summaries: impl Iterator<Item = &'a [f64]>, d: usize) -> Result<Scaling> {
        match self {
            ScalingRule::Identity => Ok(Scaling::Identity),
            ScalingRule::Variance => Scaling::standardized(summaries, d),
            ScalingRule::Mad => Scaling::robust(summaries, d),
        }
    }
}

impl FromStr for ScalingRule {
    type Err = AbcError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "identity" | "none" => Ok(ScalingRule::Identity),
            "variance" | "standardized" | "standardised" => Ok(ScalingRule::Variance),
            "mad" | "robust" => Ok(ScalingRule::Mad),
            _ => Err(AbcError::Config(format!("unknown scaling '{s}'"))),
        }
    }
}

/// Kernel family, scaling matrix and bandwidth.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub scaling: Scaling,
    epsilon: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, scaling: Scaling, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(AbcError::Domain {
                what: "bandwidth (must be > 0)",
                value: epsilon,
            });
        }
        Ok(KernelSpec {
            family,
            scaling,
            epsilon,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.family, self.scaling.clone(), epsilon)
    }

    /// `K(v)` for an already bandwidth-scaled difference `v`.
    pub fn eval(&self, v: &[f64]) -> Result<f64> {
        self.scaling.check_dim(v.len())?;
        Ok(self
            .family
            .at_radius(self.scaling.norm_sq(v).max(0.0).sqrt()))
    }

    /// `||(s - s_obs) / epsilon||_Lambda`.
    pub fn scaled_distance(&self, s: &[f64], s_obs: &[f64]) -> Result<f64> {
        Ok(self.scaling.distance(s, s_obs)? / self.epsilon)
    }

    /// Kernel value at unscaled distance `distance = ||s - s_obs||_Lambda`.
    #[inline]
    pub fn weight_at_distance(&self, distance: f64) -> f64 {
        self.family.at_radius(distance / self.epsilon)
    }
}

/// Bandwidth equal to the `ceil(q N)`-th smallest distance, so that a
/// uniform kernel accepts (at least) that many of the `N` draws.
pub fn bandwidth_from_proportion(distances: &[f64], q: f64) -> Result<f64> {
    if distances.is_empty() {
        return Err(AbcError::Empty("distances"));
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(AbcError::Domain {
            what: "acceptance proportion (0, 1]",
            value: q,
        });
    }
    let k = ((q * distances.len() as f64).ceil() as usize).clamp(1, distances.len());
    let mut buf = distances.to_vec();
    let (_, kth, _) = buf.select_nth_unstable_by(k - 1, f64::total_cmp);
    Ok(*kth)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FAMILIES: [KernelFamily; 3] = [
        KernelFamily::Gaussian,
        KernelFamily::Uniform,
        KernelFamily::Epanechnikov,
    ];

    #[test]
    fn unit_at_origin() {
        for f in FAMILIES {
            let k = KernelSpec::new(f, Scaling::Identity, 0.7).unwrap();
            assert_eq!(k.eval(&[0.0, 0.0]).unwrap(), 1.0);
        }
    }

    #[test]
    fn gaussian_value() {
        let k = KernelSpec::new(KernelFamily::Gaussian, Scaling::Identity, 1.0).unwrap();
        let r = 2f64.sqrt();
        assert!((k.eval(&[r]).unwrap() - (-1f64).exp()).abs() < 1e-15);
        assert!((k.eval(&[1.0, 1.0]).unwrap() - 0.367_879_441_171_442_3).abs() < 1e-15);
    }

    #[test]
    fn uniform_support() {
        let k = KernelSpec::new(KernelFamily::Uniform, Scaling::Identity, 1.0).unwrap();
        assert_eq!(k.eval(&[1.0001]).unwrap(), 0.0);
        assert_eq!(k.eval(&[1.0]).unwrap(), 1.0);
    }

    #[test]
    fn euclidean_distance() {
        let k = KernelSpec::new(KernelFamily::Uniform, Scaling::Identity, 1.0).unwrap();
        assert_eq!(k.scaled_distance(&[3.0, 4.0], &[0.0, 0.0]).unwrap(), 5.0);
        assert_eq!(k.scaled_distance(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        let k2 = k.with_epsilon(2.0).unwrap();
        assert_eq!(k2.scaled_distance(&[3.0, 4.0], &[0.0, 0.0]).unwrap(), 2.5);
    }

    #[test]
    fn full_matrix_matches_brute_force() {
        let l = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.5, 2.0, 0.0, -0.3, 0.1, 0.7]);
        let lambda = &l * l.transpose();
        let k = KernelSpec::new(
            KernelFamily::Gaussian,
            Scaling::full(lambda.clone()).unwrap(),
            0.5,
        )
        .unwrap();
        let s = [0.3, -1.2, 2.0];
        let s_obs = [0.1, 0.4, 1.0];
        let v: Vec<f64> = s.iter().zip(&s_obs).map(|(a, b)| (a - b) / 0.5).collect();
        let mut q = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                q += v[i] * lambda[(i, j)] * v[j];
            }
        }
        let got = k.scaled_distance(&s, &s_obs).unwrap();
        assert!((got - q.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(KernelSpec::new(KernelFamily::Uniform, Scaling::Identity, 0.0).is_err());
        assert!(Scaling::diagonal(vec![1.0, 0.0]).is_err());
        let not_pd = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(Scaling::full(not_pd).is_err());
        let k = KernelSpec::new(
            KernelFamily::Uniform,
            Scaling::diagonal(vec![1.0, 1.0]).unwrap(),
            1.0,
        )
        .unwrap();
        assert!(k.eval(&[1.0]).is_err());
        assert!(k.scaled_distance(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn bandwidth_order_statistics() {
        assert_eq!(
            bandwidth_from_proportion(&[4.0, 1.0, 3.0, 2.0], 0.5).unwrap(),
            2.0
        );
        assert_eq!(
            bandwidth_from_proportion(&[4.0, 1.0, 3.0, 2.0], 1.0).unwrap(),
            4.0
        );
        assert!(bandwidth_from_proportion(&[], 0.5).is_err());
        assert!(bandwidth_from_proportion(&[1.0], 0.0).is_err());
    }

    #[test]
    fn bandwidth_reaccepts_target_proportion() {
        use rand::Rng;
        let mut rng = crate::rng::rng_from_seed(17);
        let d: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>().sqrt()).collect();
        let eps = bandwidth_from_proportion(&d, 0.25).unwrap();
        let k = KernelSpec::new(KernelFamily::Uniform, Scaling::Identity, eps).unwrap();
        let accepted = d.iter().filter(|&&x| k.weight_at_distance(x) > 0.0).count();
        assert!((accepted as f64 / d.len() as f64 - 0.25).abs() < 0.01);
    }

    #[test]
    fn standardized_scaling_uses_inverse_variance() {
        let rows = [[0.0, 10.0], [2.0, 30.0]];
        let s = Scaling::standardized(rows.iter().map(|r| &r[..]), 2).unwrap();
        match s {
            Scaling::Diagonal(w) => {
                assert!((w[0] - 0.5).abs() < 1e-15);
                assert!((w[1] - 1.0 / 200.0).abs() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn robust_scaling_ignores_outliers() {
        let mut rows: Vec<Vec<f64>> = (0..1001)
            .map(|i| vec![(i as f64 - 500.0) / 100.0])
            .collect();
        rows[0][0] = 1e9;
        let Scaling::Diagonal(w) = Scaling::robust(rows.iter().map(Vec::as_slice), 1).unwrap()
        else {
            panic!()
        };
        // MAD of a uniform grid on [-5, 5] is 2.5.
        let spread = 1.4826 * 2.5;
        assert!((w[0] - 1.0 / (spread * spread)).abs() < 1e-2 * w[0]);
        assert_eq!("robust".parse::<ScalingRule>().unwrap(), ScalingRule::Mad);
    }
}
