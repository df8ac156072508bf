use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{AbcError, Result};
use crate::models::Prior;

/// Where proposed parameters come from.
#[derive(Debug, Clone, PartialEq)]
pub enum ProposalSpec {
    /// Sample from the prior; importance weights are identically 1.
    Prior,
    /// Location-scale normal `sigma * X + mu` with `X ~ N(0, shape)`.
    Gaussian(GaussianProposal),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianProposal {
    mu: Vec<f64>,
    sigma: f64,
    shape: DMatrix<f64>,
    /// Lower Cholesky factor of `sigma^2 * shape`.
    chol: DMatrix<f64>,
    log_norm: f64,
}

impl GaussianProposal {
    pub fn new(mu: Vec<f64>, sigma: f64, shape: DMatrix<f64>) -> Result<Self> {
        let p = mu.len();
        if shape.nrows() != p || shape.ncols() != p {
            return Err(AbcError::Dimension {
                context: "proposal shape matrix",
                expected: p,
                got: shape.nrows(),
            });
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(AbcError::Domain {
                what: "proposal scale (must be > 0)",
                value: sigma,
            });
        }
        let cov = &shape * (sigma * sigma);
        let chol = cov
            .cholesky()
            .ok_or(AbcError::NotPositiveDefinite("proposal covariance"))?
            .l();
        let log_det: f64 = chol.diagonal().iter().map(|d| 2.0 * d.ln()).sum();
        let log_norm = -0.5 * (p as f64 * (2.0 * std::f64::consts::PI).ln() + log_det);
        Ok(GaussianProposal {
            mu,
            sigma,
            shape,
            chol,
            log_norm,
        })
    }

    pub fn mean(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    pub fn cov(&self) -> DMatrix<f64> {
        &self.shape * (self.sigma * self.sigma)
    }

    pub fn log_density(&self, theta: &[f64]) -> f64 {
        let diff = DVector::from_iterator(
            self.mu.len(),
            theta.iter().zip(&self.mu).map(|(t, m)| t - m),
        );
        let z = self
            .chol
            .solve_lower_triangular(&diff)
            .expect("cholesky factor has a positive diagonal");
        self.log_norm - 0.5 * z.norm_squared()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let z = DVector::from_iterator(
            self.mu.len(),
            (0..self.mu.len()).map(|_| rng.sample::<f64, _>(StandardNormal)),
        );
        let x = &self.chol * z;
        x.iter().zip(&self.mu).map(|(x, m)| x + m).collect()
    }
}

impl ProposalSpec {
    pub fn sample<R: Rng + ?Sized>(&self, prior: &Prior, rng: &mut R) -> Vec<f64> {
        match self {
            ProposalSpec::Prior => prior.sample(rng),
            ProposalSpec::Gaussian(g) => g.sample(rng),
        }
    }

    /// Importance weight `pi(theta) / q(theta)`; zero outside the prior
    /// support and exactly 1 for prior proposals.
    pub fn weight(&self, prior: &Prior, theta: &[f64]) -> f64 {
        match self {
            ProposalSpec::Prior => 1.0,
            ProposalSpec::Gaussian(g) => {
                let pi = prior.density(theta);
                if pi <= 0.0 {
                    0.0
                } else {
                    (pi.ln() - g.log_density(theta)).exp()
                }
            }
        }
    }
}

/// Normal proposal with mean `center + offset` and covariance `c^2 cov`.
pub fn make_proposal(
    center: &[f64],
    cov: &DMatrix<f64>,
    c: f64,
    offset: &[f64],
) -> Result<ProposalSpec> {
    if offset.len() != center.len() {
        return Err(AbcError::Dimension {
            context: "proposal offset",
            expected: center.len(),
            got: offset.len(),
        });
    }
    let mu = center.iter().zip(offset).map(|(a, b)| a + b).collect();
    Ok(ProposalSpec::Gaussian(GaussianProposal::new(
        mu,
        c,
        cov.clone(),
    )?))
}

/// Offset of `fraction` posterior standard deviations in every coordinate.
pub fn sd_offset(cov: &DMatrix<f64>, fraction: f64) -> Vec<f64> {
    cov.diagonal().iter().map(|v| fraction * v.sqrt()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    fn cov2() -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 0.5])
    }

    #[test]
    fn inflation_and_offset() {
        let p = make_proposal(&[1.0, 2.0], &cov2(), 2.0, &[0.5, -0.5]).unwrap();
        let ProposalSpec::Gaussian(g) = p else {
            panic!()
        };
        assert_eq!(g.mean(), &[1.5, 1.5]);
        assert!((g.cov() - cov2() * 4.0).abs().max() < 1e-12);

        let p1 = make_proposal(&[1.0, 2.0], &cov2(), 1.0, &[0.0, 0.0]).unwrap();
        let ProposalSpec::Gaussian(g1) = p1 else {
            panic!()
        };
        assert!((g1.cov() - cov2()).abs().max() < 1e-12);
    }

    #[test]
    fn half_sd_offset() {
        let off = sd_offset(&cov2(), 0.5);
        assert!((off[0] - 0.5 * 2f64.sqrt()).abs() < 1e-15);
        assert!((off[1] - 0.5 * 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_pd() {
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(make_proposal(&[0.0, 0.0], &bad, 1.0, &[0.0, 0.0]).is_err());
        assert!(make_proposal(&[0.0, 0.0], &cov2(), 0.0, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn density_matches_univariate_formula() {
        let g = GaussianProposal::new(vec![1.0], 2.0, DMatrix::from_element(1, 1, 0.25)).unwrap();
        // N(1, 1)
        let x: f64 = 0.3;
        let expect = -0.5 * (2.0 * std::f64::consts::PI).ln() - 0.5 * (x - 1.0).powi(2);
        assert!((g.log_density(&[x]) - expect).abs() < 1e-14);
    }

    #[test]
    fn sample_moments() {
        let g = GaussianProposal::new(vec![1.0, -1.0], 1.0, cov2()).unwrap();
        let mut rng = rng_from_seed(3);
        let m = 200_000;
        let xs: Vec<Vec<f64>> = (0..m).map(|_| g.sample(&mut rng)).collect();
        let mean0 = xs.iter().map(|x| x[0]).sum::<f64>() / m as f64;
        let c01 = xs.iter().map(|x| (x[0] - 1.0) * (x[1] + 1.0)).sum::<f64>() / m as f64;
        assert!((mean0 - 1.0).abs() < 0.01);
        assert!((c01 - 0.3).abs() < 0.01);
    }

    #[test]
    fn weights() {
        let prior = Prior::uniform_box(vec![0.0], vec![10.0]).unwrap();
        assert_eq!(ProposalSpec::Prior.weight(&prior, &[3.0]), 1.0);
        let g = make_proposal(&[5.0], &DMatrix::from_element(1, 1, 1.0), 1.0, &[0.0]).unwrap();
        assert_eq!(g.weight(&prior, &[-1.0]), 0.0);
        let w = g.weight(&prior, &[5.0]);
        assert!((w - 0.1 * (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
    }
}
