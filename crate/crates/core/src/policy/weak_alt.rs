//! Two-block Shannon variant for weakly observable graphs.
//!
//! Coordinates in `V1` carry `beta1_t h(p)` and follow the weak-policy
//! recurrences; coordinates in `V2` carry `beta2_t h(p)` and follow the
//! strong-policy recurrence driven by `a2_t = -sum_{V2} h(q_t(i))`:
//!
//! ```text
//! beta2_1 = c1',  beta2_{t+1} = beta2_t + c1' / sqrt(1 + sum_{s<=t} a2_s / ln K),
//! gamma2_t = 1 / (2 beta2_t),
//! p_t = (1 - gamma1_t - gamma2_t) q_t + gamma1_t mu_D + gamma2_t mu_{V2}.
//! ```
//!
//! When `gamma1_t + gamma2_t` exceeds 1/2 both rates are scaled down by the
//! same factor.

use serde::{Deserialize, Serialize};

use super::weak::{
    check_weak_analysis, check_weak_params, gamma_prime, gamma_ratio, weak_block_checks,
    WeakParams,
};
use super::{accumulate, at_least, cumulative, Policy, RoundPlan};
use crate::error::{Error, Result};
use crate::feedback::EstimatedLoss;
use crate::ftrl::{
    pair_entropy_sum, pair_variance_sum, shannon_entropy, solve_separable, RegularizerSpec,
    RegularizerTerm,
};
use crate::graph::{FeedbackGraph, GraphAnalysis};
use crate::numeric::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakAltParams {
    pub c1: f64,
    pub c2: f64,
    /// Scale of the `V2` block learning rate, at least 1.
    pub c1_second: f64,
}

#[derive(Debug, Clone, Copy)]
struct Pending {
    b: f64,
    gamma_prime: f64,
    a2: f64,
}

#[derive(Debug, Clone)]
pub struct WeakAltPolicy {
    k: usize,
    t: u64,
    losses: Vec<CompensatedSum>,
    params: WeakAltParams,
    beta1: f64,
    beta2: f64,
    dominating: Vec<usize>,
    v1: Vec<usize>,
    v1_mask: Vec<bool>,
    v2: Vec<usize>,
    b_sum: f64,
    za_sum: f64,
    prev_ratio: Option<f64>,
    a2_sum: f64,
    pending: Option<Pending>,
    clip_events: u64,
}

impl WeakAltPolicy {
    pub fn new(g: &FeedbackGraph, analysis: &GraphAnalysis, params: WeakAltParams) -> Result<Self> {
        check_weak_analysis(g, analysis)?;
        if analysis.v2.is_empty() {
            return Err(Error::EmptyV2);
        }
        check_weak_params(
            g.num_arms(),
            WeakParams {
                c1: params.c1,
                c2: params.c2,
            },
        )?;
        if !(params.c1_second >= 1.0 && params.c1_second.is_finite()) {
            return Err(Error::BadParameter(format!(
                "second-block c1 must be at least 1, got {}",
                params.c1_second
            )));
        }
        let d = analysis.dominating_set.len() as f64;
        Ok(Self {
            k: g.num_arms(),
            t: 1,
            losses: vec![CompensatedSum::new(); g.num_arms()],
            params,
            beta1: params.c2.max(8.0 * d),
            beta2: params.c1_second,
            dominating: analysis.dominating_set.clone(),
            v1: analysis.v1.clone(),
            v1_mask: analysis.v1_mask(),
            v2: analysis.v2.clone(),
            b_sum: 0.0,
            za_sum: 0.0,
            prev_ratio: None,
            a2_sum: 0.0,
            pending: None,
            clip_events: 0,
        })
    }

    pub fn round(&self) -> u64 {
        self.t
    }

    pub fn betas(&self) -> (f64, f64) {
        (self.beta1, self.beta2)
    }

    pub fn params(&self) -> WeakAltParams {
        self.params
    }

    pub fn clip_events(&self) -> u64 {
        self.clip_events
    }

    fn regularizer(&self) -> Result<RegularizerSpec> {
        let terms = self
            .v1_mask
            .iter()
            .map(|&in_v1| {
                RegularizerTerm::ShannonPair(if in_v1 { self.beta1 } else { self.beta2 })
            })
            .collect();
        RegularizerSpec::new(terms)
    }
}

impl Policy for WeakAltPolicy {
    fn name(&self) -> &'static str {
        "weak_alt"
    }

    fn next_round(&mut self) -> Result<RoundPlan> {
        if self.pending.is_some() {
            return Err(Error::SequencingViolation("next_round called twice without update"));
        }
        let q = solve_separable(&cumulative(&self.losses), &self.regularizer()?)?;

        let a = pair_entropy_sum(&q, &self.v1);
        if let Some(ratio) = self.prev_ratio {
            self.za_sum += ratio * a;
        }
        let a2 = pair_entropy_sum(&q, &self.v2);
        let b = pair_variance_sum(&q, &self.v1);
        let gp = gamma_prime(self.params.c1, b, self.b_sum + b);
        let mut gamma1 = gp + 2.0 * self.dominating.len() as f64 / self.beta1;
        let mut gamma2 = 0.5 / self.beta2;
        let clipped = gamma1 + gamma2 > 0.5;
        if clipped {
            let scale = 0.5 / (gamma1 + gamma2);
            gamma1 *= scale;
            gamma2 *= scale;
            self.clip_events += 1;
            log::debug!("round {}: exploration rates scaled by {scale}", self.t);
        }
        let p = q.mix(&[(gamma1, &self.dominating), (gamma2, &self.v2)])?;
        self.pending = Some(Pending {
            b,
            gamma_prime: gp,
            a2,
        });
        Ok(RoundPlan {
            t: self.t,
            entropy: shannon_entropy(&q),
            q,
            p,
            gamma: gamma1 + gamma2,
            beta: self.beta1,
            beta2: Some(self.beta2),
            gamma2: Some(gamma2),
            a,
            b: Some(b),
            gamma_prime: Some(gp),
            clipped,
        })
    }

    fn update(&mut self, estimate: &EstimatedLoss) -> Result<()> {
        let Pending { b, gamma_prime, a2 } = self
            .pending
            .take()
            .ok_or(Error::SequencingViolation("update called before next_round"))?;
        self.b_sum += b;
        let ratio = gamma_ratio(b, gamma_prime, self.params.c1, self.b_sum);
        self.beta1 += self.params.c2 * ratio / (self.params.c1 + self.za_sum).sqrt();
        self.prev_ratio = Some(ratio);

        self.a2_sum += a2;
        let ln_k = (self.k as f64).ln();
        self.beta2 += self.params.c1_second / (1.0 + self.a2_sum / ln_k).sqrt();

        accumulate(&mut self.losses, estimate);
        self.t += 1;
        Ok(())
    }

    fn check_round(&self, plan: &RoundPlan, estimate: &EstimatedLoss) -> Vec<String> {
        let gamma2 = plan.gamma2.unwrap_or(0.0);
        let gamma1 = plan.gamma - gamma2;
        let mut out =
            weak_block_checks(plan, estimate, &self.dominating, &self.v1, &self.v2, gamma1);
        let floor2 = gamma2 / self.v2.len() as f64;
        for &j in &self.v2 {
            if !at_least(plan.p[j], floor2) {
                out.push(format!("p({}) = {} < gamma2/|V2| = {floor2}", j + 1, plan.p[j]));
            }
        }
        out
    }
}
