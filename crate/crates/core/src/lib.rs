//! Likelihood-free Bayesian inference by kernel ABC with local-linear
//! regression adjustment.
//!
//! The crate is organised bottom-up:
//!
//! - [`models`]: simulators (g-and-k, a conjugate Gaussian oracle), priors
//!   and summary statistics;
//! - [`kernels`]: acceptance kernels, scaling matrices and bandwidth choice
//!   by acceptance proportion;
//! - [`samplers`]: rejection / importance-sampling ABC and weighted
//!   posterior estimates;
//! - [`regression`]: the regression adjustment;
//! - [`asymptotics`]: experiments on large-sample behaviour (limit shapes,
//!   acceptance-rate regimes, required acceptance rates);
//! - [`config`], [`io`], [`commands`] and [`verify`]: the batch front end.
//!
//! Runnable walkthroughs live in `examples/`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod kernels;
pub mod models;
pub mod normal;
pub mod regression;
pub mod rng;
pub mod samplers;
pub mod verify;

pub use error::{AbcError, Result};
