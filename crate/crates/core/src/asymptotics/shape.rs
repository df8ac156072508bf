use crate::error::{AbcError, Result};
use crate::kernels::KernelFamily;
use crate::normal;

/// Limiting density of a rescaled ABC posterior (one coordinate).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitReference {
    /// `N(0, var)`, e.g. `var = I(theta_0)^{-1}`; the limit of the raw
    /// posterior when `a_n eps_n -> 0` and of the adjusted posterior.
    Normal { var: f64 },
    /// Density proportional to `K(ds * t)`; the limit of the raw posterior
    /// scaled by `1/eps_n` when `a_n eps_n -> inf`.
    KernelShape { family: KernelFamily, ds: f64 },
}

impl LimitReference {
    pub fn density(&self, t: f64) -> f64 {
        match *self {
            LimitReference::Normal { var } => normal::pdf(t / var.sqrt()) / var.sqrt(),
            LimitReference::KernelShape { family, ds } => {
                let u = ds * t;
                let norm = match family {
                    KernelFamily::Uniform => 2.0,
                    KernelFamily::Gaussian => (2.0 * std::f64::consts::PI).sqrt(),
                    KernelFamily::Epanechnikov => 4.0 / 3.0,
                };
                family.at_radius(u.abs()) * ds.abs() / norm
            }
        }
    }

    pub fn cdf(&self, t: f64) -> f64 {
        match *self {
            LimitReference::Normal { var } => normal::cdf(t / var.sqrt()),
            LimitReference::KernelShape { family, ds } => {
                let u = ds.abs() * t;
                match family {
                    KernelFamily::Uniform => ((u + 1.0) / 2.0).clamp(0.0, 1.0),
                    KernelFamily::Gaussian => normal::cdf(u),
                    KernelFamily::Epanechnikov => {
                        let u = u.clamp(-1.0, 1.0);
                        0.5 + 0.75 * (u - u * u * u / 3.0)
                    }
                }
            }
        }
    }
}

/// Kolmogorov-Smirnov distance between the (weighted) empirical CDF of
/// `values` and `cdf`.
pub fn ks_distance(values: &[f64], weights: Option<&[f64]>, cdf: impl Fn(f64) -> f64) -> f64 {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_unstable_by(|&a, &b| values[a].total_cmp(&values[b]));
    let total: f64 = match weights {
        Some(w) => w.iter().sum(),
        None => values.len() as f64,
    };
    let mut acc = 0.0;
    let mut d = 0.0f64;
    let mut k = 0;
    while k < idx.len() {
        let x = values[idx[k]];
        let f = cdf(x);
        let before = acc / total;
        while k < idx.len() && values[idx[k]] == x {
            acc += weights.map_or(1.0, |w| w[idx[k]]);
            k += 1;
        }
        let after = acc / total;
        d = d.max((f - before).abs()).max((after - f).abs());
    }
    d
}

/// Centres `values` at their (weighted) mean, multiplies by `scale` and
/// returns the KS distance to `reference`.
pub fn shape_test(
    values: &[f64],
    weights: Option<&[f64]>,
    reference: &LimitReference,
    scale: f64,
) -> Result<f64> {
    const MIN_DRAWS: usize = 500;
    if values.len() < MIN_DRAWS {
        return Err(AbcError::InsufficientSample {
            needed: MIN_DRAWS,
            have: values.len(),
        });
    }
    if let Some(w) = weights {
        if w.len() != values.len() {
            return Err(AbcError::Dimension {
                context: "shape-test weights",
                expected: values.len(),
                got: w.len(),
            });
        }
    }
    let (sw, swx) = values
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(a, b), (i, &x)| {
            let w = weights.map_or(1.0, |w| w[i]);
            (a + w, b + w * x)
        });
    let centre = swx / sw;
    let scaled: Vec<f64> = values.iter().map(|x| (x - centre) * scale).collect();
    Ok(ks_distance(&scaled, weights, |t| reference.cdf(t)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn references() -> Vec<LimitReference> {
        vec![
            LimitReference::Normal { var: 0.7 },
            LimitReference::KernelShape {
                family: KernelFamily::Uniform,
                ds: 0.5,
            },
            LimitReference::KernelShape {
                family: KernelFamily::Gaussian,
                ds: 2.0,
            },
            LimitReference::KernelShape {
                family: KernelFamily::Epanechnikov,
                ds: 0.8,
            },
        ]
    }

    #[test]
    fn densities_integrate_to_one() {
        for r in references() {
            let h = 1e-4;
            let total: f64 = (-200_000..200_000)
                .map(|i| r.density((i as f64 + 0.5) * h) * h)
                .sum();
            assert!((total - 1.0).abs() < 1e-6, "{r:?}: {total}");
        }
    }

    #[test]
    fn cdf_is_integral_of_density() {
        for r in references() {
            let h = 1e-4;
            let mut acc = 0.0;
            let mut t = -20.0;
            while t < 0.7 {
                acc += r.density(t + 0.5 * h) * h;
                t += h;
            }
            assert!((acc - r.cdf(t)).abs() < 1e-5, "{r:?}");
        }
    }

    #[test]
    fn ks_on_exact_quantiles_is_small() {
        let r = LimitReference::Normal { var: 1.0 };
        let m = 10_000;
        let xs: Vec<f64> = (0..m)
            .map(|i| normal::quantile((i as f64 + 0.5) / m as f64))
            .collect();
        let d = ks_distance(&xs, None, |t| r.cdf(t));
        assert!(d <= 0.5 / m as f64 + 1e-12);
    }

    #[test]
    fn too_few_draws() {
        let r = LimitReference::Normal { var: 1.0 };
        assert!(shape_test(&[0.0; 10], None, &r, 1.0).is_err());
    }
}
