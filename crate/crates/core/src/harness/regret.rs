use serde::Serialize;

use super::episode::Trace;
use crate::env::{EnvSpec, GroundTruth};
use crate::error::{Error, Result};

/// `sum_t Delta(I_t)`.
pub fn pseudo_regret(trace: &Trace, truth: &GroundTruth) -> Result<f64> {
    let gaps = truth.gaps().ok_or(Error::NoGroundTruth)?;
    Ok(gaps
        .iter()
        .zip(&trace.totals.arm_plays)
        .map(|(g, &n)| g * n as f64)
        .sum())
}

/// `max_i sum_t (l_t(I_t) - l_t(i))` on the realized losses.
pub fn realized_regret(trace: &Trace) -> f64 {
    let best = trace
        .totals
        .arm_losses
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    trace.totals.cumulative_loss - best
}

/// Pseudo-regret when the environment certifies gaps, realized regret
/// otherwise.
pub fn final_regret(trace: &Trace, truth: &GroundTruth) -> f64 {
    pseudo_regret(trace, truth).unwrap_or_else(|_| realized_regret(trace))
}

/// The arm `Q` is measured against: `i*` when known, otherwise the best
/// arm in hindsight.
pub fn reference_arm(trace: &Trace) -> usize {
    trace.i_star.unwrap_or_else(|| {
        let losses = &trace.totals.arm_losses;
        (0..losses.len())
            .min_by(|&a, &b| losses[a].total_cmp(&losses[b]))
            .expect("at least two arms")
    })
}

/// `Q(i*) = sum_t (1 - q_t(i*))` together with its per-round partial sums.
pub fn q_quantity(trace: &Trace, i_star: usize) -> Result<(f64, Vec<f64>)> {
    if trace.rounds.is_empty() && trace.totals.horizon > 0 {
        return Err(Error::MissingTraceField("rounds"));
    }
    let mut series = Vec::with_capacity(trace.rounds.len());
    let mut total = 0.0;
    for r in &trace.rounds {
        let q = match (&r.q, r.q_istar) {
            (Some(q), _) => q[i_star],
            (None, Some(q)) if trace.i_star == Some(i_star) => q,
            _ => return Err(Error::MissingTraceField("q_istar")),
        };
        total += 1.0 - q;
        series.push(total);
    }
    Ok((total, series))
}

/// `Q ln(e K T / Q)`, extended by 0 at `Q = 0`.
pub fn entropy_sum_bound(q: f64, k: usize, horizon: u64) -> f64 {
    if q <= 0.0 {
        return 0.0;
    }
    q * (std::f64::consts::E * k as f64 * horizon as f64 / q).ln()
}

/// End-of-run checks of the accumulated entropy terms against `Q(i*)`:
/// `sum_t H(q_t) <= Q ln(eKT/Q)` for single-block policies and
/// `A_T <= 2 Q ln(eKT/Q)`, `B_T <= 2 Q` for the weak policies.
pub fn lemma_checks(trace: &Trace, i_star: usize) -> Vec<String> {
    let totals = &trace.totals;
    let q = totals.q_missing[i_star];
    let bound = entropy_sum_bound(q, trace.num_arms, totals.horizon);
    let tol = |x: f64| 1e-9 * x.abs().max(1.0);
    let mut out = Vec::new();
    match totals.b_sum {
        None => {
            if totals.entropy_sum > bound + tol(bound) {
                out.push(format!(
                    "sum H(q_t) = {} exceeds Q ln(eKT/Q) = {bound}",
                    totals.entropy_sum
                ));
            }
        }
        Some(b) => {
            if totals.a_sum > 2.0 * bound + tol(bound) {
                out.push(format!("A_T = {} exceeds 2 Q ln(eKT/Q) = {}", totals.a_sum, 2.0 * bound));
            }
            if b > 2.0 * q + tol(q) {
                out.push(format!("B_T = {b} exceeds 2 Q = {}", 2.0 * q));
            }
        }
    }
    out
}

/// Mean and standard error (sample standard deviation over `sqrt(n)`).
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Least-squares slope of `ln y` against `ln x`. `None` unless there are two
/// distinct `x` values and every coordinate is positive.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Per-round regret averaged over seeds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegretCurve {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

/// Per-round partial sums of `Delta(I_t)`.
pub fn pseudo_regret_curve(trace: &Trace, truth: &GroundTruth) -> Result<Vec<f64>> {
    let gaps = truth.gaps().ok_or(Error::NoGroundTruth)?;
    if trace.rounds.is_empty() && trace.totals.horizon > 0 {
        return Err(Error::MissingTraceField("rounds"));
    }
    let mut total = 0.0;
    Ok(trace
        .rounds
        .iter()
        .map(|r| {
            total += gaps[r.arm];
            total
        })
        .collect())
}

/// Regret curves over seeds: pseudo-regret for environments with gaps,
/// realized best-fixed-arm regret (replaying the deterministic schedule)
/// for adversarial ones.
pub fn empirical_regret(traces: &[Trace], env: &EnvSpec) -> Result<RegretCurve> {
    let truth = env.ground_truth();
    let curves = traces
        .iter()
        .map(|trace| match truth {
            GroundTruth::SelfBounding { .. } => pseudo_regret_curve(trace, &truth),
            GroundTruth::NoCertificate => realized_regret_curve(trace, env),
        })
        .collect::<Result<Vec<_>>>()?;
    let len = curves.iter().map(Vec::len).min().unwrap_or(0);
    let (mean, stderr) = (0..len)
        .map(|t| mean_stderr(&curves.iter().map(|c| c[t]).collect::<Vec<_>>()))
        .unzip();
    Ok(RegretCurve { mean, stderr })
}

fn realized_regret_curve(trace: &Trace, env: &EnvSpec) -> Result<Vec<f64>> {
    if trace.rounds.is_empty() && trace.totals.horizon > 0 {
        return Err(Error::MissingTraceField("rounds"));
    }
    let mut source = env.stream(trace.num_arms, trace.seed)?;
    let mut arm_totals = vec![0.0; trace.num_arms];
    let mut incurred = 0.0;
    trace
        .rounds
        .iter()
        .map(|r| {
            let losses = source.losses(r.t)?;
            for (acc, l) in arm_totals.iter_mut().zip(&losses) {
                *acc += l;
            }
            incurred += r.loss;
            Ok(incurred - arm_totals.iter().copied().fold(f64::INFINITY, f64::min))
        })
        .collect()
}
