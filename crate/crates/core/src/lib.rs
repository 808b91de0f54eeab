//! Best-of-both-worlds follow-the-regularized-leader policies for online
//! learning with directed feedback graphs.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: feedback graphs, observability classes, weakly dominating
//!   sets and independence numbers.
//! - [`ftrl`]: simplex solvers for the regularized-leader subproblem.
//! - [`feedback`]: observation probabilities and the importance-weighted
//!   loss estimator.
//! - [`policy`]: the strongly / weakly observable policies and the
//!   fixed-rate Exp3.G baseline.
//! - [`env`]: stochastic, corrupted and oblivious adversarial loss sources.
//! - [`harness`]: episodes, regret accounting, traces and seed sweeps.

pub mod env;
pub mod error;
pub mod feedback;
pub mod ftrl;
pub mod graph;
pub mod harness;
pub mod numeric;
pub mod policy;
pub mod rng;

pub use error::{Error, Result};
pub use graph::{FeedbackGraph, GraphAnalysis, ObservabilityClass, Observability};
