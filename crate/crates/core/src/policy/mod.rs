//! FTRL policies over feedback graphs.
//!
//! Every policy follows the same two-step round protocol:
//! [`Policy::next_round`] solves for `q_t`, mixes in exploration and returns
//! the sampling distribution `p_t`; [`Policy::update`] then consumes the
//! importance-weighted estimate for that round. Calling either twice in a
//! row is a [`crate::Error::SequencingViolation`].

mod exp3g;
mod strong;
mod weak;
mod weak_alt;

pub use exp3g::{exp3g_parameters, Exp3GPolicy};
pub use strong::{recommended_c1, StrongPolicy};
pub use weak::{recommended_weak_params, WeakParams, WeakPolicy};
pub use weak_alt::{WeakAltParams, WeakAltPolicy};

use crate::feedback::EstimatedLoss;
use crate::ftrl::SimplexPoint;
use crate::numeric::CompensatedSum;

/// Everything a policy decided in one round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundPlan {
    pub t: u64,
    pub q: SimplexPoint,
    pub p: SimplexPoint,
    /// Total exploration mass.
    pub gamma: f64,
    pub beta: f64,
    /// Learning rate of the second regularizer block, if any.
    pub beta2: Option<f64>,
    /// Part of `gamma` spread over the second block, if any.
    pub gamma2: Option<f64>,
    /// `H(q_t)`.
    pub entropy: f64,
    /// The entropy-like quantity that drives the learning-rate recurrence.
    pub a: f64,
    /// `sum_{V1} q(1 - q)`, weak policies only.
    pub b: Option<f64>,
    pub gamma_prime: Option<f64>,
    /// The exploration rate was clipped to keep the total at most 1/2.
    pub clipped: bool,
}

pub trait Policy: Send {
    fn name(&self) -> &'static str;

    fn next_round(&mut self) -> crate::Result<RoundPlan>;

    fn update(&mut self, estimate: &EstimatedLoss) -> crate::Result<()>;

    /// Policy-specific per-round invariants; returns one message per
    /// violation.
    fn check_round(&self, _plan: &RoundPlan, _estimate: &EstimatedLoss) -> Vec<String> {
        Vec::new()
    }
}

pub(crate) fn cumulative(losses: &[CompensatedSum]) -> Vec<f64> {
    losses.iter().map(CompensatedSum::value).collect()
}

pub(crate) fn accumulate(losses: &mut [CompensatedSum], estimate: &EstimatedLoss) {
    for (acc, &l) in losses.iter_mut().zip(&estimate.values) {
        acc.add(l);
    }
}

/// `a >= b * (1 - rel) - abs`, used by the invariant checks.
pub(crate) fn at_least(a: f64, b: f64) -> bool {
    a >= b - 1e-12 * b.abs().max(1.0)
}
