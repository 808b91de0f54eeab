//! Independent reference implementations shared by the integration tests.
//! Nothing here calls the library routine it is used to check.
#![allow(dead_code)]

use std::sync::{Arc, Mutex};

use graphftrl::env::LossSource;
use graphftrl::feedback::EstimatedLoss;
use graphftrl::ftrl::{RegularizerSpec, RegularizerTerm, SimplexPoint};
use graphftrl::graph::{DominationTarget, FeedbackGraph};
use graphftrl::harness::sample_arm;
use graphftrl::policy::{Policy, RoundPlan};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------
// Regularizer pieces written out independently of the library.

fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

pub fn term_value(t: &RegularizerTerm, x: f64) -> f64 {
    match *t {
        RegularizerTerm::ShannonFull(b) => b * xlnx(x),
        RegularizerTerm::ShannonPair(b) => b * (xlnx(x) + xlnx(1.0 - x)),
        RegularizerTerm::RootPair(w) => -2.0 * w * (x.sqrt() + (1.0 - x).sqrt()),
    }
}

fn term_grad(t: &RegularizerTerm, x: f64) -> f64 {
    match *t {
        RegularizerTerm::ShannonFull(b) => b * (x.ln() + 1.0),
        RegularizerTerm::ShannonPair(b) => b * (x / (1.0 - x)).ln(),
        RegularizerTerm::RootPair(w) => w * (1.0 / (1.0 - x).sqrt() - 1.0 / x.sqrt()),
    }
}

fn term_hess(t: &RegularizerTerm, x: f64) -> f64 {
    match *t {
        RegularizerTerm::ShannonFull(b) => b / x,
        RegularizerTerm::ShannonPair(b) => b / (x * (1.0 - x)),
        RegularizerTerm::RootPair(w) => 0.5 * w * (x.powf(-1.5) + (1.0 - x).powf(-1.5)),
    }
}

pub fn objective(losses: &[f64], terms: &[RegularizerTerm], p: &[f64]) -> f64 {
    p.iter()
        .zip(losses)
        .zip(terms)
        .map(|((&x, &l), t)| l * x + term_value(t, x))
        .sum()
}

/// Primal solver: equality-constrained Newton with the diagonal Hessian as
/// metric (a variable-metric projected gradient method), fraction-to-the-
/// boundary step control and Armijo backtracking, started from uniform.
pub fn projected_newton_oracle(losses: &[f64], terms: &[RegularizerTerm]) -> Vec<f64> {
    let k = losses.len();
    let mut p = vec![1.0 / k as f64; k];
    for _ in 0..500 {
        let g: Vec<f64> = (0..k).map(|i| losses[i] + term_grad(&terms[i], p[i])).collect();
        let h: Vec<f64> = (0..k).map(|i| term_hess(&terms[i], p[i])).collect();
        let inv_sum: f64 = h.iter().map(|x| 1.0 / x).sum();
        let nu = (0..k).map(|i| g[i] / h[i]).sum::<f64>() / inv_sum;
        let d: Vec<f64> = (0..k).map(|i| -(g[i] - nu) / h[i]).collect();
        let decrement: f64 = (0..k).map(|i| d[i] * d[i] * h[i]).sum();
        if decrement < 1e-30 {
            break;
        }
        let mut step: f64 = 1.0;
        for i in 0..k {
            if d[i] < 0.0 {
                step = step.min(0.99 * p[i] / -d[i]);
            } else if d[i] > 0.0 {
                step = step.min(0.99 * (1.0 - p[i]) / d[i]);
            }
        }
        let f0 = objective(losses, terms, &p);
        let slope: f64 = (0..k).map(|i| g[i] * d[i]).sum();
        loop {
            let cand: Vec<f64> = (0..k).map(|i| p[i] + step * d[i]).collect();
            let f1 = objective(losses, terms, &cand);
            if f1 <= f0 + 1e-4 * step * slope || step < 1e-12 {
                p = cand;
                break;
            }
            step *= 0.5;
        }
        let s: f64 = p.iter().sum();
        for x in &mut p {
            *x /= s;
        }
    }
    p
}

/// Exhaustive grid search for K = 2 or 3 (coarse check of the optimum).
pub fn grid_search(losses: &[f64], terms: &[RegularizerTerm], n: usize) -> Vec<f64> {
    let k = losses.len();
    let mut best = (f64::INFINITY, vec![]);
    let step = 1.0 / n as f64;
    match k {
        2 => {
            for a in 1..n {
                let p = vec![a as f64 * step, 1.0 - a as f64 * step];
                let f = objective(losses, terms, &p);
                if f < best.0 {
                    best = (f, p);
                }
            }
        }
        3 => {
            for a in 1..n {
                for b in 1..n - a {
                    let (x, y) = (a as f64 * step, b as f64 * step);
                    let p = vec![x, y, 1.0 - x - y];
                    let f = objective(losses, terms, &p);
                    if f < best.0 {
                        best = (f, p);
                    }
                }
            }
        }
        _ => panic!("grid search supports K = 2 or 3"),
    }
    best.1
}

pub fn softmax_oracle(losses: &[f64], beta: f64) -> Vec<f64> {
    let m = losses.iter().copied().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = losses.iter().map(|l| (-(l - m) / beta).exp()).collect();
    let z: f64 = w.iter().sum();
    w.iter().map(|x| x / z).collect()
}

pub fn shannon(q: &[f64]) -> f64 {
    -q.iter().map(|&x| xlnx(x)).sum::<f64>()
}

pub fn pair_h(x: f64) -> f64 {
    xlnx(x) + xlnx(1.0 - x)
}

pub fn random_spec(rng: &mut impl Rng, k: usize) -> RegularizerSpec {
    let terms = (0..k)
        .map(|_| {
            let w = rng.gen_range(0.5..50.0);
            if rng.gen_bool(0.5) {
                RegularizerTerm::ShannonPair(w)
            } else {
                RegularizerTerm::RootPair(w)
            }
        })
        .collect();
    RegularizerSpec::new(terms).unwrap()
}

// ---------------------------------------------------------------------
// Graph enumerators.

/// Fuzz corpus: `K` uniform in 2..=10, edge probability uniform in
/// [0.1, 0.9], each self-loop present with probability 1/2.
pub fn fuzz_corpus(n: usize, seed: u64) -> Vec<FeedbackGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let k = rng.gen_range(2..=10);
            let p = rng.gen_range(0.1..0.9);
            let mut edges = Vec::new();
            for i in 0..k {
                for j in 0..k {
                    let keep = if i == j { rng.gen_bool(0.5) } else { rng.gen_bool(p) };
                    if keep {
                        edges.push((i, j));
                    }
                }
            }
            FeedbackGraph::new(k, edges).unwrap()
        })
        .collect()
}

pub fn out_mask(g: &FeedbackGraph, i: usize) -> u32 {
    g.out_neighbors(i).iter().fold(0, |m, &j| m | (1 << j))
}

/// Targets written from the definitions: vertices without a self-loop, or
/// only those that are also not observed by every other vertex.
pub fn brute_targets(g: &FeedbackGraph, def: DominationTarget) -> u32 {
    let k = g.num_arms();
    let mut mask = 0;
    for i in 0..k {
        if g.has_edge(i, i) {
            continue;
        }
        let seen_by_all = (0..k).filter(|&j| j != i).all(|j| g.has_edge(j, i));
        let include = match def {
            DominationTarget::NoSelfLoop => true,
            DominationTarget::WeaklyObservable => {
                !seen_by_all && (0..k).any(|j| g.has_edge(j, i))
            }
        };
        if include {
            mask |= 1 << i;
        }
    }
    mask
}

/// Smallest dominating subset by scanning all `2^K` subsets.
pub fn brute_delta(g: &FeedbackGraph, def: DominationTarget) -> Option<usize> {
    let k = g.num_arms();
    let targets = brute_targets(g, def);
    let outs: Vec<u32> = (0..k).map(|i| out_mask(g, i)).collect();
    (0u32..1 << k)
        .filter(|&s| {
            let cover = (0..k).filter(|&i| s >> i & 1 == 1).fold(0, |m, i| m | outs[i]);
            cover & targets == targets
        })
        .map(|s| s.count_ones() as usize)
        .min()
}

/// Largest set without an edge in either direction between distinct
/// members, by scanning all `2^K` subsets.
pub fn brute_alpha(g: &FeedbackGraph) -> usize {
    let k = g.num_arms();
    let mut adj = vec![0u32; k];
    for (i, j) in g.edges() {
        if i != j {
            adj[i] |= 1 << j;
            adj[j] |= 1 << i;
        }
    }
    (0u32..1 << k)
        .filter(|&s| (0..k).all(|i| s >> i & 1 == 0 || adj[i] & s == 0))
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap()
}

pub fn is_weakly_observable(g: &FeedbackGraph) -> bool {
    let k = g.num_arms();
    let observable = (0..k).all(|i| (0..k).any(|j| g.has_edge(j, i)));
    let strong = (0..k).all(|i| g.has_edge(i, i) || (0..k).filter(|&j| j != i).all(|j| g.has_edge(j, i)));
    observable && !strong
}

// ---------------------------------------------------------------------
// Straight-line recurrence oracles, driven by a fixed estimate script.

/// Deterministic estimate vectors in [0, 5).
pub fn estimate_script(k: usize, rounds: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..rounds)
        .map(|_| {
            (0..k)
                .map(|_| if rng.gen_bool(0.4) { rng.gen_range(0.0..5.0) } else { 0.0 })
                .collect()
        })
        .collect()
}

pub fn as_estimate(v: &[f64]) -> EstimatedLoss {
    EstimatedLoss {
        values: v.to_vec(),
        obs_prob: vec![1.0; v.len()],
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StrongRow {
    pub beta: f64,
    pub gamma: f64,
}

pub fn strong_oracle(k: usize, c1: f64, script: &[Vec<f64>]) -> Vec<StrongRow> {
    let mut cum = vec![0.0; k];
    let mut beta = c1;
    let mut h_sum = 0.0;
    let mut rows = Vec::new();
    for est in script {
        let q = softmax_oracle(&cum, beta);
        rows.push(StrongRow {
            beta,
            gamma: 1.0 / (2.0 * beta),
        });
        h_sum += shannon(&q);
        beta += c1 / (1.0 + h_sum / (k as f64).ln()).sqrt();
        for (c, e) in cum.iter_mut().zip(est) {
            *c += e;
        }
    }
    rows
}

#[derive(Debug, Clone, Copy)]
pub struct WeakRow {
    pub beta: f64,
    pub gamma_prime: f64,
    pub gamma: f64,
    pub beta2: f64,
}

/// Hybrid weak recurrences (`second = None`) or the two-block variant
/// (`second = Some(c1')`), with `q_t` from the primal Newton oracle.
#[allow(clippy::too_many_arguments)]
pub fn weak_oracle(
    k: usize,
    v1: &[usize],
    v2: &[usize],
    d: usize,
    c1: f64,
    c2: f64,
    second: Option<f64>,
    script: &[Vec<f64>],
) -> Vec<WeakRow> {
    let mut cum = vec![0.0; k];
    let mut beta = c2.max(8.0 * d as f64);
    let mut beta2 = second.unwrap_or(f64::NAN);
    let mut bs: Vec<f64> = Vec::new();
    let mut gps: Vec<f64> = Vec::new();
    let mut as_: Vec<f64> = Vec::new();
    let mut a2_sum = 0.0;
    let mut rows = Vec::new();
    for (t0, est) in script.iter().enumerate() {
        let t = (t0 + 1) as f64;
        let terms: Vec<RegularizerTerm> = (0..k)
            .map(|i| {
                if v1.contains(&i) {
                    RegularizerTerm::ShannonPair(beta)
                } else if second.is_some() {
                    RegularizerTerm::ShannonPair(beta2)
                } else {
                    RegularizerTerm::RootPair(t.sqrt())
                }
            })
            .collect();
        let q = projected_newton_oracle(&cum, &terms);
        let a: f64 = v1.iter().map(|&i| -pair_h(q[i])).sum();
        let b: f64 = v1.iter().map(|&i| q[i] * (1.0 - q[i])).sum();
        as_.push(a);
        bs.push(b);
        let b_total: f64 = bs.iter().sum();
        let gp = 0.25 * c1 * b / (c1 + b_total.cbrt());
        gps.push(gp);
        let mut gamma = gp + 2.0 * d as f64 / beta;
        let mut gamma2 = if second.is_some() { 0.5 / beta2 } else { 0.0 };
        if gamma + gamma2 > 0.5 {
            let s = 0.5 / (gamma + gamma2);
            gamma *= s;
            gamma2 *= s;
        }
        rows.push(WeakRow {
            beta,
            gamma_prime: gp,
            gamma: gamma + gamma2,
            beta2,
        });
        // Z_t = sum_{s=1}^{t-1} (b_s / gamma'_s) a_{s+1}, 1-indexed.
        let n = bs.len();
        let z: f64 = (0..n - 1).map(|s| bs[s] / gps[s] * as_[s + 1]).sum();
        beta += c2 * b / (gp * (c1 + z).sqrt());
        if let Some(c) = second {
            a2_sum += v2.iter().map(|&i| -pair_h(q[i])).sum::<f64>();
            beta2 += c / (1.0 + a2_sum / (k as f64).ln()).sqrt();
        }
        for (c, e) in cum.iter_mut().zip(est) {
            *c += e;
        }
    }
    rows
}

// ---------------------------------------------------------------------
// Information hygiene: a spy policy and a canary loss source.

/// Wraps a policy, publishes each `p_t` and records every estimate it is
/// handed.
pub struct Spy<P: Policy> {
    pub inner: P,
    pub last_p: Arc<Mutex<Option<SimplexPoint>>>,
    pub seen: Arc<Mutex<Vec<EstimatedLoss>>>,
}

impl<P: Policy> Policy for Spy<P> {
    fn name(&self) -> &'static str {
        "spy"
    }

    fn next_round(&mut self) -> graphftrl::Result<RoundPlan> {
        let plan = self.inner.next_round()?;
        *self.last_p.lock().unwrap() = Some(plan.p.clone());
        Ok(plan)
    }

    fn update(&mut self, estimate: &EstimatedLoss) -> graphftrl::Result<()> {
        self.seen.lock().unwrap().push(estimate.clone());
        self.inner.update(estimate)
    }
}

/// Emits honest losses on `N_out(I_t)` and NaN everywhere else, predicting
/// `I_t` from the published `p_t` and the harness's sampling stream.
pub struct Canary {
    pub graph: FeedbackGraph,
    pub seed: u64,
    pub last_p: Arc<Mutex<Option<SimplexPoint>>>,
    pub chosen: Vec<usize>,
}

pub fn canary_loss(t: u64, j: usize) -> f64 {
    ((t as f64) * 0.618_033_988_7 + j as f64 * 0.414_213_562_3).fract()
}

impl LossSource for Canary {
    fn num_arms(&self) -> usize {
        self.graph.num_arms()
    }

    fn losses(&mut self, t: u64) -> graphftrl::Result<Vec<f64>> {
        let p = self.last_p.lock().unwrap().clone().expect("plan published before losses");
        let arm = sample_arm(self.seed, t, &p);
        self.chosen.push(arm);
        let mut l = vec![f64::NAN; self.graph.num_arms()];
        for &j in self.graph.out_neighbors(arm) {
            l[j] = canary_loss(t, j);
        }
        Ok(l)
    }
}
