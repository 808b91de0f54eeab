use serde::{Deserialize, Serialize};

use super::{LossSource, StochasticSpec};
use crate::error::{Error, Result};

/// How the adversary spends its corruption budget. Both strategies act on
/// the optimal arm `i*` and the runner-up `j`, and the per-round cost is
/// the max-norm change of the loss vector. When the remaining budget is
/// smaller than the full change the move is truncated so that the ledger
/// lands exactly on the budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorruptionStrategy {
    /// From round 1 on, push `l(i*)` to 1 and `l(j)` to 0 until the budget
    /// is spent.
    FlipOptimalPrefix,
    /// Swap `l(i*)` and `l(j)` during the first `period` rounds of every
    /// `2 * period`, until the budget is spent.
    PeriodicSwap { period: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CorruptedFields")]
pub struct CorruptedSpec {
    base: StochasticSpec,
    budget: f64,
    strategy: CorruptionStrategy,
}

#[derive(Deserialize)]
struct CorruptedFields {
    base: StochasticSpec,
    budget: f64,
    strategy: CorruptionStrategy,
}

impl TryFrom<CorruptedFields> for CorruptedSpec {
    type Error = Error;

    fn try_from(f: CorruptedFields) -> Result<Self> {
        Self::new(f.base, f.budget, f.strategy)
    }
}

/// Slack for floating point in the budget ledger.
const LEDGER_TOL: f64 = 1e-9;

impl CorruptedSpec {
    pub fn new(base: StochasticSpec, budget: f64, strategy: CorruptionStrategy) -> Result<Self> {
        if !(budget >= 0.0 && budget.is_finite()) {
            return Err(Error::BadParameter(format!(
                "corruption budget must be finite and nonnegative, got {budget}"
            )));
        }
        if strategy == (CorruptionStrategy::PeriodicSwap { period: 0 }) {
            return Err(Error::BadParameter("swap period must be positive".into()));
        }
        Ok(Self {
            base,
            budget,
            strategy,
        })
    }

    pub fn base(&self) -> &StochasticSpec {
        &self.base
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn strategy(&self) -> CorruptionStrategy {
        self.strategy
    }

    pub fn source(&self, seed: u64) -> CorruptedSource {
        CorruptedSource {
            i_star: self.base.i_star(),
            runner_up: self.base.runner_up(),
            spec: self.clone(),
            seed,
            spent: 0.0,
            next_t: 1,
        }
    }
}

/// Corrupted draws must be requested in round order because the budget
/// ledger carries over between rounds.
#[derive(Debug, Clone)]
pub struct CorruptedSource {
    spec: CorruptedSpec,
    seed: u64,
    i_star: usize,
    runner_up: usize,
    spent: f64,
    next_t: u64,
}

impl CorruptedSource {
    fn corrupt(&self, t: u64, l: &mut [f64]) -> f64 {
        let remaining = self.spec.budget - self.spent;
        if remaining <= 0.0 {
            return 0.0;
        }
        let (i, j) = (self.i_star, self.runner_up);
        match self.spec.strategy {
            CorruptionStrategy::FlipOptimalPrefix => {
                let up = (1.0 - l[i]).min(remaining);
                let down = l[j].min(remaining);
                l[i] += up;
                l[j] -= down;
                up.max(down)
            }
            CorruptionStrategy::PeriodicSwap { period } => {
                if !((t - 1) / period).is_multiple_of(2) {
                    return 0.0;
                }
                let gap = l[j] - l[i];
                let step = gap.abs().min(remaining).copysign(gap);
                l[i] += step;
                l[j] -= step;
                step.abs()
            }
        }
    }
}

impl LossSource for CorruptedSource {
    fn num_arms(&self) -> usize {
        self.spec.base.num_arms()
    }

    fn losses(&mut self, t: u64) -> Result<Vec<f64>> {
        if t != self.next_t {
            return Err(Error::SequencingViolation(
                "corrupted losses must be drawn in round order",
            ));
        }
        let mut l = self.spec.base.draw(self.seed, t);
        let cost = self.corrupt(t, &mut l);
        self.spent += cost;
        if self.spent > self.spec.budget + LEDGER_TOL {
            return Err(Error::BudgetExceeded {
                spent: self.spent,
                budget: self.spec.budget,
            });
        }
        self.next_t += 1;
        Ok(l)
    }

    fn realized_corruption(&self) -> f64 {
        self.spent
    }
}
