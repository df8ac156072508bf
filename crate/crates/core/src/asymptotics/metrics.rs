use crate::error::{AbcError, Result};

/// Average relative errors `(RE_mu, RE_sigma)` over the parameter
/// coordinates: `(1/p) sum |est_k - ref_k| / |ref_k|`.
pub fn re_metrics(
    est_mean: &[f64],
    est_sd: &[f64],
    ref_mean: &[f64],
    ref_sd: &[f64],
) -> Result<(f64, f64)> {
    let p = ref_mean.len();
    for (len, what) in [
        (est_mean.len(), "estimated means"),
        (est_sd.len(), "estimated sds"),
        (ref_sd.len(), "reference sds"),
    ] {
        if len != p {
            return Err(AbcError::Dimension {
                context: what,
                expected: p,
                got: len,
            });
        }
    }
    if p == 0 {
        return Err(AbcError::Empty("reference values"));
    }
    if let Some(&z) = ref_mean.iter().chain(ref_sd).find(|v| **v == 0.0) {
        return Err(AbcError::Domain {
            what: "relative-error reference (must be nonzero)",
            value: z,
        });
    }
    let rel = |est: &[f64], reference: &[f64]| {
        est.iter()
            .zip(reference)
            .map(|(e, r)| ((e - r) / r).abs())
            .sum::<f64>()
            / p as f64
    };
    Ok((rel(est_mean, ref_mean), rel(est_sd, ref_sd)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_match_is_zero() {
        let m = [3.0, 1.0, 2.0, 0.5];
        assert_eq!(re_metrics(&m, &m, &m, &m).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn uniform_inflation() {
        let m = [3.0, 1.0, 2.0, 0.5];
        let up: Vec<f64> = m.iter().map(|x| x * 1.1).collect();
        let (re_mu, re_sigma) = re_metrics(&up, &m, &m, &m).unwrap();
        assert!((re_mu - 0.1).abs() < 1e-12);
        assert_eq!(re_sigma, 0.0);
    }

    #[test]
    fn single_coordinate_error() {
        let m = [3.0, 1.0, 2.0, 0.5];
        let (re_mu, _) = re_metrics(&[3.3, 1.0, 2.0, 0.5], &m, &m, &m).unwrap();
        assert!((re_mu - 0.025).abs() < 1e-12);
    }

    #[test]
    fn zero_reference_rejected() {
        assert!(re_metrics(&[1.0], &[1.0], &[0.0], &[1.0]).is_err());
        assert!(re_metrics(&[1.0], &[1.0], &[1.0, 2.0], &[1.0]).is_err());
    }
}
