//! Rejection and importance-sampling ABC.
//!
//! Draw `i` of a run seeded with `seed` uses its own generator seeded from
//! `(seed, i)`: it proposes `theta`, takes a simulator seed, then an
//! acceptance uniform, always in that order. Changing the kernel or the
//! bandwidth therefore re-decides acceptance on identical simulations.

mod estimates;
mod proposal;
mod run;

pub use estimates::{
    effective_sample_size, estimate_pacc, posterior_estimates, weighted_moments, Moments,
};
pub use proposal::{make_proposal, sd_offset, GaussianProposal, ProposalSpec};
pub use run::{
    run_rejection, run_threshold_by_proportion, sample_accepted, AbcDraw, AbcRun, AcceptanceMode,
    SimulationPool,
};
