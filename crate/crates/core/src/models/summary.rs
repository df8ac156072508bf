use crate::error::{AbcError, Result};

use super::SummaryVec;

/// Levels `k / (d + 1)` for `k = 1..=d`.
pub fn quantile_levels(d: usize) -> Vec<f64> {
    (1..=d).map(|k| k as f64 / (d + 1) as f64).collect()
}

/// Type-7 empirical quantile of already sorted data.
pub fn type7_quantile(sorted: &[f64], level: f64) -> f64 {
    let (lo, hi, frac) = type7_position(sorted.len(), level);
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Order-statistic indices (0-based) and interpolation weight for a type-7
/// quantile at `level` of `n` points.
pub(crate) fn type7_position(n: usize, level: f64) -> (usize, usize, f64) {
    let h = (n - 1) as f64 * level;
    let lo = (h.floor() as usize).min(n - 1);
    let hi = (lo + 1).min(n - 1);
    (lo, hi, h - lo as f64)
}

/// `d` evenly spaced empirical quantiles of `data`.
pub fn quantile_summaries(data: &[f64], d: usize) -> Result<SummaryVec> {
    if data.is_empty() {
        return Err(AbcError::Empty("dataset"));
    }
    if d == 0 || d > data.len() {
        return Err(AbcError::InvalidParameter(format!(
            "summary dimension {d} must lie in 1..={}",
            data.len()
        )));
    }
    let mut sorted = data.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let values = quantile_levels(d)
        .into_iter()
        .map(|level| type7_quantile(&sorted, level))
        .collect();
    SummaryVec::new(values)
}
