//! Fixed-rate Exp3.G: Shannon FTRL with constant
//! `gamma = min(sqrt(1 / (alpha T)), 1/2)` and `beta = 1 / (2 gamma)`.
//! Comparison baseline only.

use super::{accumulate, cumulative, Policy, RoundPlan};
use crate::error::{Error, Result};
use crate::feedback::EstimatedLoss;
use crate::ftrl::{shannon_entropy, solve_shannon};
use crate::graph::{classify_observability, FeedbackGraph, Observability};
use crate::numeric::CompensatedSum;

/// `(gamma, beta)` for independence number `alpha` and horizon `T`.
pub fn exp3g_parameters(alpha: usize, horizon: u64) -> Result<(f64, f64)> {
    if alpha == 0 || horizon == 0 {
        return Err(Error::BadParameter("alpha and T must be positive".into()));
    }
    let gamma = (1.0 / (alpha as f64 * horizon as f64)).sqrt().min(0.5);
    Ok((gamma, 0.5 / gamma))
}

#[derive(Debug, Clone)]
pub struct Exp3GPolicy {
    all_arms: Vec<usize>,
    t: u64,
    losses: Vec<CompensatedSum>,
    gamma: f64,
    beta: f64,
    pending: bool,
}

impl Exp3GPolicy {
    pub fn new(g: &FeedbackGraph, alpha: usize, horizon: u64) -> Result<Self> {
        if classify_observability(g).tag != Observability::StronglyObservable {
            return Err(Error::NotStronglyObservable);
        }
        let (gamma, beta) = exp3g_parameters(alpha, horizon)?;
        let k = g.num_arms();
        Ok(Self {
            all_arms: (0..k).collect(),
            t: 1,
            losses: vec![CompensatedSum::new(); k],
            gamma,
            beta,
            pending: false,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

impl Policy for Exp3GPolicy {
    fn name(&self) -> &'static str {
        "exp3g"
    }

    fn next_round(&mut self) -> Result<RoundPlan> {
        if std::mem::replace(&mut self.pending, true) {
            return Err(Error::SequencingViolation("next_round called twice without update"));
        }
        let q = solve_shannon(&cumulative(&self.losses), self.beta)?;
        let p = q.mix(&[(self.gamma, &self.all_arms)])?;
        let entropy = shannon_entropy(&q);
        Ok(RoundPlan {
            t: self.t,
            q,
            p,
            gamma: self.gamma,
            beta: self.beta,
            beta2: None,
            gamma2: None,
            entropy,
            a: entropy,
            b: None,
            gamma_prime: None,
            clipped: false,
        })
    }

    fn update(&mut self, estimate: &EstimatedLoss) -> Result<()> {
        if !std::mem::replace(&mut self.pending, false) {
            return Err(Error::SequencingViolation("update called before next_round"));
        }
        accumulate(&mut self.losses, estimate);
        self.t += 1;
        Ok(())
    }
}
