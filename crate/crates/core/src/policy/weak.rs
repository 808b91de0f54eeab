//! FTRL for weakly observable graphs.
//!
//! The regularizer is `beta_t sum_{V1} h(p_i) + sqrt(t) sum_{V2} g(p_i)` with
//! `h(x) = x ln x + (1-x) ln(1-x)` and `g(x) = -2 sqrt(x) - 2 sqrt(1-x)`;
//! exploration is uniform over the weakly dominating set `D`. With
//! `a_t = -sum_{V1} h(q_t(i))`, `b_t = sum_{V1} q_t(i)(1 - q_t(i))` and
//! `B_t = sum_{s<=t} b_s`:
//!
//! ```text
//! gamma'_t    = c1 b_t / (4 (c1 + B_t^{1/3}))
//! gamma_t     = gamma'_t + 2|D| / beta_t               (capped at 1/2)
//! beta_1      = max(c2, 8|D|)
//! beta_{t+1}  = beta_t + c2 (b_t / gamma'_t) / sqrt(c1 + Z_t)
//! Z_t         = sum_{s=1}^{t-1} (b_s / gamma'_s) a_{s+1}
//! ```
//!
//! Round order: solve `q_t` with `beta_t`; record `a_t`, which completes the
//! `s = t-1` term of `Z_t`; compute `b_t`, `gamma'_t`, `gamma_t` and act;
//! on update, fold in the loss estimate and compute `beta_{t+1}`.
//!
//! `b_t / gamma'_t` equals `4 (c1 + B_t^{1/3}) / c1` whenever `b_t > 0`; that
//! expression is used as the continuous extension when `b_t` underflows.

use serde::{Deserialize, Serialize};

use super::{accumulate, at_least, cumulative, Policy, RoundPlan};
use crate::error::{Error, Result};
use crate::feedback::EstimatedLoss;
use crate::ftrl::{
    pair_entropy_sum, pair_variance_sum, shannon_entropy, solve_separable, RegularizerSpec,
};
use crate::graph::{covers_targets, FeedbackGraph, GraphAnalysis, Observability};
use crate::numeric::CompensatedSum;

/// Below this `b_t` the ratio `b_t / gamma'_t` is taken from its limit.
const DEGENERATE_B: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakParams {
    pub c1: f64,
    pub c2: f64,
}

/// `c1 = max(2 ln K, (|D| ln T ln(KT))^{1/3})`, `c2 = max(1, sqrt(|D| ln T))`.
pub fn recommended_weak_params(delta: usize, k: usize, horizon: f64) -> Result<WeakParams> {
    if delta < 1 || k < 2 || !(horizon >= 2.0) {
        return Err(Error::BadParameter(format!(
            "recommended_weak_params needs |D| >= 1, K >= 2, T >= 2 (got {delta}, {k}, {horizon})"
        )));
    }
    let (d, kf, t) = (delta as f64, k as f64, horizon);
    Ok(WeakParams {
        c1: (2.0 * kf.ln()).max((d * t.ln() * (kf * t).ln()).cbrt()),
        c2: (d * t.ln()).sqrt().max(1.0),
    })
}

/// `b / gamma'` for the current round, exact or via the limit expression.
pub(crate) fn gamma_ratio(b: f64, gamma_prime: f64, c1: f64, b_total: f64) -> f64 {
    if b >= DEGENERATE_B {
        b / gamma_prime
    } else {
        4.0 * (c1 + b_total.cbrt()) / c1
    }
}

pub(crate) fn gamma_prime(c1: f64, b: f64, b_total: f64) -> f64 {
    0.25 * c1 * b / (c1 + b_total.cbrt())
}

pub(crate) fn check_weak_params(k: usize, params: WeakParams) -> Result<()> {
    let floor = 2.0 * (k as f64).ln();
    if !(params.c1 >= floor && params.c1.is_finite()) {
        return Err(Error::BadParameter(format!(
            "c1 = {} must be at least 2 ln K = {floor}",
            params.c1
        )));
    }
    if !(params.c2 > 0.0 && params.c2.is_finite()) {
        return Err(Error::BadParameter(format!("c2 = {} must be positive", params.c2)));
    }
    Ok(())
}

pub(crate) fn check_weak_analysis(g: &FeedbackGraph, analysis: &GraphAnalysis) -> Result<()> {
    if analysis.observability.tag != Observability::WeaklyObservable {
        return Err(Error::NotWeaklyObservable);
    }
    if analysis.num_arms() != g.num_arms() {
        return Err(Error::BadParameter("analysis does not match graph".into()));
    }
    if analysis.dominating_set.is_empty()
        || !covers_targets(g, &analysis.dominating_set, analysis.definition)
    {
        return Err(Error::InvalidDominatingSet(
            "weak policies need a nonempty weakly dominating set".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
struct Pending {
    b: f64,
    gamma_prime: f64,
}

#[derive(Debug, Clone)]
pub struct WeakPolicy {
    t: u64,
    losses: Vec<CompensatedSum>,
    beta: f64,
    params: WeakParams,
    dominating: Vec<usize>,
    v1: Vec<usize>,
    v1_mask: Vec<bool>,
    v2: Vec<usize>,
    /// `sum_{s<t} b_s`.
    b_sum: f64,
    /// `Z` over the terms completed so far.
    za_sum: f64,
    /// `b_{t-1} / gamma'_{t-1}`.
    prev_ratio: Option<f64>,
    pending: Option<Pending>,
    clip_events: u64,
}

impl WeakPolicy {
    pub fn new(g: &FeedbackGraph, analysis: &GraphAnalysis, params: WeakParams) -> Result<Self> {
        check_weak_analysis(g, analysis)?;
        check_weak_params(g.num_arms(), params)?;
        let d = analysis.dominating_set.len() as f64;
        Ok(Self {
            t: 1,
            losses: vec![CompensatedSum::new(); g.num_arms()],
            beta: params.c2.max(8.0 * d),
            params,
            dominating: analysis.dominating_set.clone(),
            v1: analysis.v1.clone(),
            v1_mask: analysis.v1_mask(),
            v2: analysis.v2.clone(),
            b_sum: 0.0,
            za_sum: 0.0,
            prev_ratio: None,
            pending: None,
            clip_events: 0,
        })
    }

    pub fn round(&self) -> u64 {
        self.t
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn params(&self) -> WeakParams {
        self.params
    }

    pub fn b_sum(&self) -> f64 {
        self.b_sum
    }

    pub fn za_sum(&self) -> f64 {
        self.za_sum
    }

    pub fn clip_events(&self) -> u64 {
        self.clip_events
    }

    fn delta(&self) -> f64 {
        self.dominating.len() as f64
    }
}

impl Policy for WeakPolicy {
    fn name(&self) -> &'static str {
        "weak"
    }

    fn next_round(&mut self) -> Result<RoundPlan> {
        if self.pending.is_some() {
            return Err(Error::SequencingViolation("next_round called twice without update"));
        }
        let spec = RegularizerSpec::hybrid(&self.v1_mask, self.beta, (self.t as f64).sqrt())?;
        let q = solve_separable(&cumulative(&self.losses), &spec)?;

        let a = pair_entropy_sum(&q, &self.v1);
        if let Some(ratio) = self.prev_ratio {
            self.za_sum += ratio * a;
        }
        let b = pair_variance_sum(&q, &self.v1);
        let gp = gamma_prime(self.params.c1, b, self.b_sum + b);
        let mut gamma = gp + 2.0 * self.delta() / self.beta;
        let clipped = gamma > 0.5;
        if clipped {
            self.clip_events += 1;
            log::debug!("round {}: gamma {gamma} clipped to 1/2", self.t);
            gamma = 0.5;
        }
        let p = q.mix(&[(gamma, &self.dominating)])?;
        self.pending = Some(Pending { b, gamma_prime: gp });
        Ok(RoundPlan {
            t: self.t,
            entropy: shannon_entropy(&q),
            q,
            p,
            gamma,
            beta: self.beta,
            beta2: None,
            gamma2: None,
            a,
            b: Some(b),
            gamma_prime: Some(gp),
            clipped,
        })
    }

    fn update(&mut self, estimate: &EstimatedLoss) -> Result<()> {
        let Pending { b, gamma_prime } = self
            .pending
            .take()
            .ok_or(Error::SequencingViolation("update called before next_round"))?;
        self.b_sum += b;
        let ratio = gamma_ratio(b, gamma_prime, self.params.c1, self.b_sum);
        self.beta += self.params.c2 * ratio / (self.params.c1 + self.za_sum).sqrt();
        self.prev_ratio = Some(ratio);
        accumulate(&mut self.losses, estimate);
        self.t += 1;
        Ok(())
    }

    fn check_round(&self, plan: &RoundPlan, estimate: &EstimatedLoss) -> Vec<String> {
        weak_block_checks(
            plan,
            estimate,
            &self.dominating,
            &self.v1,
            &self.v2,
            plan.gamma,
        )
    }
}

/// Invariants shared by the weak policies. `gamma_d` is the exploration
/// mass placed on `D`.
pub(crate) fn weak_block_checks(
    plan: &RoundPlan,
    estimate: &EstimatedLoss,
    dominating: &[usize],
    v1: &[usize],
    v2: &[usize],
    gamma_d: f64,
) -> Vec<String> {
    let mut out = Vec::new();
    let d = dominating.len() as f64;
    if plan.gamma > 0.5 + 1e-15 {
        out.push(format!("gamma {} > 1/2", plan.gamma));
    }
    if !at_least(gamma_d, 2.0 * d / plan.beta) && !plan.clipped {
        out.push(format!("gamma {gamma_d} < 2|D|/beta = {}", 2.0 * d / plan.beta));
    }
    if let (Some(b), Some(gp)) = (plan.b, plan.gamma_prime) {
        if !at_least(plan.a, b) {
            out.push(format!("a_t = {} < b_t = {b}", plan.a));
        }
        if gp > b / 4.0 + 1e-15 {
            out.push(format!("gamma' = {gp} > b/4 = {}", b / 4.0));
        }
    }
    let floor = gamma_d / d;
    for &i in dominating {
        if !at_least(plan.p[i], floor) {
            out.push(format!("p({}) = {} < gamma/|D| = {floor}", i + 1, plan.p[i]));
        }
    }
    for &j in v1 {
        if !at_least(estimate.obs_prob[j], floor) {
            out.push(format!("P({}) = {} < gamma/|D|", j + 1, estimate.obs_prob[j]));
        }
        if estimate.values[j] > (d / gamma_d) * (1.0 + 1e-12) {
            out.push(format!(
                "estimate {} at {} exceeds |D|/gamma = {}",
                estimate.values[j],
                j + 1,
                d / gamma_d
            ));
        }
    }
    for &j in v2 {
        if !at_least(estimate.obs_prob[j], 0.5 * plan.q[j]) {
            out.push(format!("P({}) = {} < q/2", j + 1, estimate.obs_prob[j]));
        }
    }
    out
}
