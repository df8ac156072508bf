//! Runs every example except `verify_oracle`, whose checks the
//! acceptance suite already covers.

mod gk_quantiles {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/gk_quantiles.rs"
    ));
}

#[test]
fn gk_quantiles_runs() {
    gk_quantiles::run_example().expect("gk_quantiles example runs");
}

mod rejection_oracle {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/rejection_oracle.rs"
    ));
}

#[test]
fn rejection_oracle_runs() {
    rejection_oracle::run_example().expect("rejection_oracle example runs");
}

mod regression_adjust {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/regression_adjust.rs"
    ));
}

#[test]
fn regression_adjust_runs() {
    regression_adjust::run_example().expect("regression_adjust example runs");
}

mod bandwidth_by_proportion {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/bandwidth_by_proportion.rs"
    ));
}

#[test]
fn bandwidth_by_proportion_runs() {
    bandwidth_by_proportion::run_example().expect("bandwidth_by_proportion example runs");
}

mod importance_proposal {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/importance_proposal.rs"
    ));
}

#[test]
fn importance_proposal_runs() {
    importance_proposal::run_example().expect("importance_proposal example runs");
}

mod acceptance_regimes {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/acceptance_regimes.rs"
    ));
}

#[test]
fn acceptance_regimes_runs() {
    acceptance_regimes::run_example().expect("acceptance_regimes example runs");
}

mod limit_shapes {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/limit_shapes.rs"
    ));
}

#[test]
fn limit_shapes_runs() {
    limit_shapes::run_example().expect("limit_shapes example runs");
}

mod gold_standard {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/gold_standard.rs"
    ));
}

#[test]
fn gold_standard_runs() {
    gold_standard::run_example().expect("gold_standard example runs");
}

mod required_acceptance {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/required_acceptance.rs"
    ));
}

#[test]
fn required_acceptance_runs() {
    required_acceptance::run_example().expect("required_acceptance example runs");
}

mod config_run {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/config_run.rs"
    ));
}

#[test]
fn config_run_runs() {
    config_run::run_example().expect("config_run example runs");
}
