use rand::Rng;
use serde::Serialize;

use super::config::{ResolvedConfig, TraceDetail};
use crate::env::{GroundTruth, LossSource};
use crate::error::{Error, Result};
use crate::feedback::{estimate_losses, EstimatedLoss, RoundObservation};
use crate::ftrl::{entropy_upper_bound, SimplexPoint};
use crate::graph::FeedbackGraph;
use crate::numeric::CompensatedSum;
use crate::policy::{Policy, RoundPlan};
use crate::rng::{round_rng, Purpose};

/// At most this many violation messages are kept per trace; the count is
/// always exact.
const MAX_VIOLATION_MESSAGES: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    pub t: u64,
    /// 0-indexed.
    pub arm: usize,
    pub loss: f64,
    pub gamma: f64,
    pub beta: f64,
    pub beta2: Option<f64>,
    pub entropy: f64,
    pub a: f64,
    pub b: Option<f64>,
    pub gamma_prime: Option<f64>,
    pub q_istar: Option<f64>,
    pub clipped: bool,
    pub q: Option<Vec<f64>>,
    pub p: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceTotals {
    pub horizon: u64,
    pub cumulative_loss: f64,
    /// `sum_t l_t(i)` for every arm.
    pub arm_losses: Vec<f64>,
    pub arm_plays: Vec<u64>,
    /// `Q(i) = sum_t (1 - q_t(i))` for every arm.
    pub q_missing: Vec<f64>,
    pub entropy_sum: f64,
    pub a_sum: f64,
    pub b_sum: Option<f64>,
    pub clip_events: u64,
    pub final_beta: f64,
    pub final_beta2: Option<f64>,
    pub beta_monotone: bool,
    pub realized_corruption: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub policy: String,
    pub seed: u64,
    pub num_arms: usize,
    pub i_star: Option<usize>,
    /// Empty when the trace detail is [`TraceDetail::None`].
    pub rounds: Vec<RoundRecord>,
    pub totals: TraceTotals,
    pub violation_count: usize,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpisodeOptions {
    pub horizon: u64,
    pub seed: u64,
    pub detail: TraceDetail,
    pub check_invariants: bool,
}

/// Draws `I_t ~ p_t` by inverse CDF on the sampling stream of round `t`.
pub fn sample_arm(seed: u64, t: u64, p: &SimplexPoint) -> usize {
    let u: f64 = round_rng(seed, Purpose::Sampling, t).gen();
    let mut cum = 0.0;
    for (i, &x) in p.as_slice().iter().enumerate() {
        cum += x;
        if u < cum {
            return i;
        }
    }
    // Rounding left u above the accumulated mass.
    p.as_slice()
        .iter()
        .rposition(|&x| x > 0.0)
        .expect("a simplex point has positive mass")
}

pub fn run_episode(resolved: &ResolvedConfig, seed: u64) -> Result<Trace> {
    let mut policy = resolved.build_policy()?;
    let env = &resolved.config.environment;
    let mut source = env.stream(resolved.num_arms, seed)?;
    let opts = EpisodeOptions {
        horizon: resolved.config.run.horizon,
        seed,
        detail: resolved.config.run.trace,
        check_invariants: resolved.config.run.check_invariants,
    };
    run_with(
        policy.as_mut(),
        &resolved.graph,
        source.as_mut(),
        &env.ground_truth(),
        &opts,
    )
}

struct Accumulators {
    cumulative_loss: CompensatedSum,
    arm_losses: Vec<CompensatedSum>,
    arm_plays: Vec<u64>,
    q_missing: Vec<CompensatedSum>,
    entropy_sum: CompensatedSum,
    a_sum: CompensatedSum,
    b_sum: Option<CompensatedSum>,
    clip_events: u64,
    last_beta: Option<(f64, Option<f64>)>,
    beta_monotone: bool,
}

impl Accumulators {
    fn new(k: usize) -> Self {
        Self {
            cumulative_loss: CompensatedSum::new(),
            arm_losses: vec![CompensatedSum::new(); k],
            arm_plays: vec![0; k],
            q_missing: vec![CompensatedSum::new(); k],
            entropy_sum: CompensatedSum::new(),
            a_sum: CompensatedSum::new(),
            b_sum: None,
            clip_events: 0,
            last_beta: None,
            beta_monotone: true,
        }
    }

    fn record(&mut self, plan: &RoundPlan, arm: usize, losses: &[f64]) {
        self.cumulative_loss.add(losses[arm]);
        for (acc, &l) in self.arm_losses.iter_mut().zip(losses) {
            acc.add(l);
        }
        self.arm_plays[arm] += 1;
        for (acc, &q) in self.q_missing.iter_mut().zip(plan.q.as_slice()) {
            acc.add(1.0 - q);
        }
        self.entropy_sum.add(plan.entropy);
        self.a_sum.add(plan.a);
        if let Some(b) = plan.b {
            self.b_sum.get_or_insert_with(CompensatedSum::new).add(b);
        }
        self.clip_events += plan.clipped as u64;
        if let Some((beta, beta2)) = self.last_beta {
            let second_ok = match (beta2, plan.beta2) {
                (Some(prev), Some(now)) => now >= prev,
                _ => true,
            };
            self.beta_monotone &= plan.beta >= beta && second_ok;
        }
        self.last_beta = Some((plan.beta, plan.beta2));
    }
}

fn generic_checks(plan: &RoundPlan, prev_beta: Option<f64>, i_star: Option<usize>) -> Vec<String> {
    let mut out = Vec::new();
    if plan.gamma > 0.5 + 1e-15 {
        out.push(format!("gamma {} > 1/2", plan.gamma));
    }
    if let Some(prev) = prev_beta {
        if plan.beta < prev {
            out.push(format!("beta decreased from {prev} to {}", plan.beta));
        }
    }
    for (name, point) in [("q", &plan.q), ("p", &plan.p)] {
        let sum: f64 = point.as_slice().iter().sum();
        if (sum - 1.0).abs() > 1e-9 || point.as_slice().iter().any(|x| !(0.0..=1.0).contains(x)) {
            out.push(format!("{name} is not on the simplex (sum {sum})"));
        }
    }
    if let Some(i) = i_star {
        let bound = entropy_upper_bound(&plan.q, i);
        if plan.entropy > bound + 1e-12 {
            out.push(format!("H(q) = {} exceeds its bound {bound}", plan.entropy));
        }
    }
    out
}

/// The interaction loop: plan, sample, draw losses, reveal the out-neighbor
/// slice, estimate, update.
pub fn run_with(
    policy: &mut dyn Policy,
    g: &FeedbackGraph,
    source: &mut dyn LossSource,
    truth: &GroundTruth,
    opts: &EpisodeOptions,
) -> Result<Trace> {
    let k = g.num_arms();
    if source.num_arms() != k {
        return Err(Error::Config(format!(
            "loss source has {} arms, graph has {k}",
            source.num_arms()
        )));
    }
    let i_star = truth.i_star();
    let mut acc = Accumulators::new(k);
    let mut rounds = Vec::new();
    let mut violations = Vec::new();
    let mut violation_count = 0;
    let mut final_beta = (0.0, None);

    for t in 1..=opts.horizon {
        let plan = policy.next_round()?;
        let arm = sample_arm(opts.seed, t, &plan.p);
        let losses = source.losses(t)?;
        if losses.len() != k {
            return Err(Error::Config(format!("round {t}: {} losses for {k} arms", losses.len())));
        }
        let obs = RoundObservation::reveal(g, arm, &losses)?;
        let estimate: EstimatedLoss = estimate_losses(g, &plan.p, &obs)?;

        if opts.check_invariants {
            let prev = acc.last_beta.map(|(b, _)| b);
            let mut found = generic_checks(&plan, prev, i_star);
            found.extend(policy.check_round(&plan, &estimate));
            violation_count += found.len();
            for msg in found {
                if violations.len() < MAX_VIOLATION_MESSAGES {
                    violations.push(format!("t={t}: {msg}"));
                }
            }
        }
        policy.update(&estimate)?;
        acc.record(&plan, arm, &losses);
        final_beta = (plan.beta, plan.beta2);

        if opts.detail != TraceDetail::None {
            let full = opts.detail == TraceDetail::Full;
            rounds.push(RoundRecord {
                t,
                arm,
                loss: losses[arm],
                gamma: plan.gamma,
                beta: plan.beta,
                beta2: plan.beta2,
                entropy: plan.entropy,
                a: plan.a,
                b: plan.b,
                gamma_prime: plan.gamma_prime,
                q_istar: i_star.map(|i| plan.q[i]),
                clipped: plan.clipped,
                q: full.then(|| plan.q.as_slice().to_vec()),
                p: full.then(|| plan.p.as_slice().to_vec()),
            });
        }
    }

    Ok(Trace {
        policy: policy.name().to_string(),
        seed: opts.seed,
        num_arms: k,
        i_star,
        rounds,
        totals: TraceTotals {
            horizon: opts.horizon,
            cumulative_loss: acc.cumulative_loss.value(),
            arm_losses: acc.arm_losses.iter().map(CompensatedSum::value).collect(),
            arm_plays: acc.arm_plays,
            q_missing: acc.q_missing.iter().map(CompensatedSum::value).collect(),
            entropy_sum: acc.entropy_sum.value(),
            a_sum: acc.a_sum.value(),
            b_sum: acc.b_sum.map(|s| s.value()),
            clip_events: acc.clip_events,
            final_beta: final_beta.0,
            final_beta2: final_beta.1,
            beta_monotone: acc.beta_monotone,
            realized_corruption: source.realized_corruption(),
        },
        violation_count,
        violations,
    })
}
