//! Experiments on the large-sample behaviour of ABC and regression-adjusted
//! ABC: limit shapes, acceptance-rate regimes, reference posteriors and the
//! acceptance rates needed to reach a given accuracy.

mod gold;
mod metrics;
mod rate_study;
mod regime;
mod required;
mod shape;

pub use gold::{gold_standard, GoldProtocol, GoldStandard};
pub use metrics::re_metrics;
pub use rate_study::{
    rate_study, summarize_rows, RateStudyConfig, StudyRow, SummaryRow, STUDY_COLUMNS,
    SUMMARY_COLUMNS,
};
pub use regime::{
    regime_sweep, CenterRule, EpsClass, ProposalRule, RegimePoint, RegimeSpec, SweepSettings,
};
pub use required::{
    acceptance_curve, default_q_grid, required_acceptance_rate, AcceptanceCurve, CurvePoint,
    Method, Target, TargetMetric,
};
pub use shape::{ks_distance, shape_test, LimitReference};

pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    let m = values.len();
    if m == 0 {
        return f64::NAN;
    }
    if m % 2 == 1 {
        values[m / 2]
    } else {
        0.5 * (values[m / 2 - 1] + values[m / 2])
    }
}

/// Type-7 quantile of unsorted values.
pub(crate) fn quantile(values: &[f64], level: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    crate::models::type7_quantile(&v, level)
}
