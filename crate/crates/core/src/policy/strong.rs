//! Shannon-entropy FTRL for strongly observable graphs with the adaptive
//! learning rate
//!
//! ```text
//! beta_1 = c1,  beta_{t+1} = beta_t + c1 / sqrt(1 + sum_{s<=t} H(q_s) / ln K),
//! gamma_t = 1 / (2 beta_t),
//! ```
//!
//! and uniform exploration over all arms.

use super::{accumulate, at_least, cumulative, Policy, RoundPlan};
use crate::error::{Error, Result};
use crate::feedback::EstimatedLoss;
use crate::ftrl::{shannon_entropy, solve_shannon};
use crate::graph::{classify_observability, FeedbackGraph, Observability};
use crate::numeric::CompensatedSum;

/// `max(1, sqrt(alpha ln T ln(KT) / ln K))`.
pub fn recommended_c1(alpha: usize, k: usize, horizon: f64) -> Result<f64> {
    if alpha < 1 || k < 2 || !(horizon >= 2.0) {
        return Err(Error::BadParameter(format!(
            "recommended_c1 needs alpha >= 1, K >= 2, T >= 2 (got {alpha}, {k}, {horizon})"
        )));
    }
    let (a, k, t) = (alpha as f64, k as f64, horizon);
    Ok((a * t.ln() * (k * t).ln() / k.ln()).sqrt().max(1.0))
}

#[derive(Debug, Clone)]
pub struct StrongPolicy {
    k: usize,
    all_arms: Vec<usize>,
    t: u64,
    losses: Vec<CompensatedSum>,
    beta: f64,
    entropy_sum: f64,
    c1: f64,
    pending: Option<f64>,
}

impl StrongPolicy {
    pub fn new(g: &FeedbackGraph, c1: f64) -> Result<Self> {
        if classify_observability(g).tag != Observability::StronglyObservable {
            return Err(Error::NotStronglyObservable);
        }
        if !(c1 >= 1.0 && c1.is_finite()) {
            return Err(Error::BadParameter(format!("c1 must be at least 1, got {c1}")));
        }
        let k = g.num_arms();
        Ok(Self {
            k,
            all_arms: (0..k).collect(),
            t: 1,
            losses: vec![CompensatedSum::new(); k],
            beta: c1,
            entropy_sum: 0.0,
            c1,
            pending: None,
        })
    }

    pub fn round(&self) -> u64 {
        self.t
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        0.5 / self.beta
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    /// `sum_{s < t} H(q_s)` over completed rounds.
    pub fn entropy_sum(&self) -> f64 {
        self.entropy_sum
    }
}

impl Policy for StrongPolicy {
    fn name(&self) -> &'static str {
        "strong"
    }

    fn next_round(&mut self) -> Result<RoundPlan> {
        if self.pending.is_some() {
            return Err(Error::SequencingViolation("next_round called twice without update"));
        }
        let q = solve_shannon(&cumulative(&self.losses), self.beta)?;
        let gamma = self.gamma();
        let p = q.mix(&[(gamma, &self.all_arms)])?;
        let entropy = shannon_entropy(&q);
        self.pending = Some(entropy);
        Ok(RoundPlan {
            t: self.t,
            q,
            p,
            gamma,
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
        let a_t = self
            .pending
            .take()
            .ok_or(Error::SequencingViolation("update called before next_round"))?;
        self.entropy_sum += a_t;
        let ln_k = (self.k as f64).ln();
        self.beta += self.c1 / (1.0 + self.entropy_sum / ln_k).sqrt();
        accumulate(&mut self.losses, estimate);
        self.t += 1;
        Ok(())
    }

    fn check_round(&self, plan: &RoundPlan, _estimate: &EstimatedLoss) -> Vec<String> {
        let mut out = Vec::new();
        if plan.gamma > 0.5 {
            out.push(format!("gamma {} > 1/2", plan.gamma));
        }
        let floor = plan.gamma / self.k as f64;
        if let Some(i) = (0..self.k).find(|&i| !at_least(plan.p[i], floor)) {
            out.push(format!("p({}) = {} below gamma/K = {floor}", i + 1, plan.p[i]));
        }
        out
    }
}
