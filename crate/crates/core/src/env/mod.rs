//! Loss sources for the stochastic, corrupted stochastic and oblivious
//! adversarial regimes.
//!
//! An [`EnvSpec`] is an immutable description; [`EnvSpec::stream`] turns it
//! into a [`LossSource`] for one seeded run. Random draws use the
//! counter-based streams of [`crate::rng`], so the loss vector of round `t`
//! depends only on `(spec, seed, t)` and, for corrupted sources, on the
//! corruption already spent.

mod adversarial;
mod corrupted;
mod stochastic;

pub use adversarial::{load_script, AdversarialSpec, Schedule, ScriptedLosses};
pub use corrupted::{CorruptedSpec, CorruptionStrategy};
pub use stochastic::{LossFamily, StochasticSpec};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvSpec {
    Stochastic(StochasticSpec),
    Corrupted(CorruptedSpec),
    Adversarial(AdversarialSpec),
}

/// What the environment certifies about itself.
#[derive(Debug, Clone, PartialEq)]
pub enum GroundTruth {
    /// Gaps of a stochastic base distribution plus the corruption budget.
    SelfBounding {
        i_star: usize,
        gaps: Vec<f64>,
        delta_min: f64,
        corruption: f64,
    },
    /// Oblivious adversarial schedule: no gaps exist.
    NoCertificate,
}

impl GroundTruth {
    pub fn i_star(&self) -> Option<usize> {
        match self {
            GroundTruth::SelfBounding { i_star, .. } => Some(*i_star),
            GroundTruth::NoCertificate => None,
        }
    }

    pub fn gaps(&self) -> Option<&[f64]> {
        match self {
            GroundTruth::SelfBounding { gaps, .. } => Some(gaps),
            GroundTruth::NoCertificate => None,
        }
    }
}

/// A stateful loss generator for a single run.
pub trait LossSource: Send {
    fn num_arms(&self) -> usize;

    /// The full loss vector `l_t`, `t >= 1`.
    fn losses(&mut self, t: u64) -> Result<Vec<f64>>;

    /// Corruption spent so far, measured in the max norm per round.
    fn realized_corruption(&self) -> f64 {
        0.0
    }
}

impl EnvSpec {
    /// Arm count fixed by the spec itself, if any.
    pub fn declared_arms(&self) -> Option<usize> {
        match self {
            EnvSpec::Stochastic(s) => Some(s.num_arms()),
            EnvSpec::Corrupted(c) => Some(c.base().num_arms()),
            EnvSpec::Adversarial(_) => None,
        }
    }

    pub fn ground_truth(&self) -> GroundTruth {
        let (base, corruption) = match self {
            EnvSpec::Stochastic(s) => (s, 0.0),
            EnvSpec::Corrupted(c) => (c.base(), c.budget()),
            EnvSpec::Adversarial(_) => return GroundTruth::NoCertificate,
        };
        GroundTruth::SelfBounding {
            i_star: base.i_star(),
            gaps: base.gaps(),
            delta_min: base.delta_min(),
            corruption,
        }
    }

    /// Checks the spec against the arm count of the graph it will run on.
    pub fn validate(&self, k: usize) -> Result<()> {
        if let Some(declared) = self.declared_arms() {
            if declared != k {
                return Err(Error::Config(format!(
                    "environment has {declared} arms but the graph has {k}"
                )));
            }
        }
        if let EnvSpec::Adversarial(a) = self {
            a.validate(k)?;
        }
        Ok(())
    }

    pub fn stream(&self, k: usize, seed: u64) -> Result<Box<dyn LossSource>> {
        self.validate(k)?;
        Ok(match self {
            EnvSpec::Stochastic(s) => Box::new(s.source(seed)),
            EnvSpec::Corrupted(c) => Box::new(c.source(seed)),
            EnvSpec::Adversarial(a) => Box::new(a.source(k)?),
        })
    }
}
