//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Verdicts use the recommended parameters throughout. Where a scaling
//! criterion depends on the tuning constants, the same measurement with
//! the smallest admissible constants is printed as a diagnostic line; it
//! never affects the verdict. Set `ACCEPTANCE_STRICT=1` to make any FAIL
//! exit nonzero.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use common::*;
use graphftrl::env::GroundTruth;
use graphftrl::feedback::{estimate_losses, observation_probabilities, RoundObservation};
use graphftrl::ftrl::{entropy_upper_bound, kkt_residual, solve_separable, SimplexPoint};
use graphftrl::graph::{
    analyze, covers_targets, independence_number, parse_graph_spec, weakly_dominating_set_exact,
    weakly_dominating_set_greedy, AlphaMode, AnalysisOptions, DominationTarget, FeedbackGraph,
};
use graphftrl::harness::{
    final_regret, lemma_checks, loglog_slope, mean_stderr, reference_arm, resolve, run_episode,
    run_seeds, run_with, sweep, EpisodeOptions, ResolvedConfig, RunConfig, Trace, TraceDetail,
};
use graphftrl::policy::{
    recommended_weak_params, Policy, StrongPolicy, WeakPolicy,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
    diagnostics: Vec<String>,
}

impl Verdict {
    fn new(pass: bool, detail: String) -> Self {
        Self {
            pass,
            detail,
            diagnostics: Vec::new(),
        }
    }
}

const SEEDS_20: &str = "[0,1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19]";

fn resolved(json: &str, overrides: &[&str]) -> ResolvedConfig {
    let overrides: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    resolve(&RunConfig::from_json_with_overrides(json, &overrides).unwrap()).unwrap()
}

/// Mean and standard error of the final regret over the config's seeds.
fn regret_stats(r: &ResolvedConfig) -> (f64, f64) {
    let truth = r.config.environment.ground_truth();
    let regrets: Vec<f64> = run_seeds(r, 0)
        .unwrap()
        .into_iter()
        .map(|t| final_regret(&t.unwrap(), &truth))
        .collect();
    mean_stderr(&regrets)
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn criterion_1() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut worst_kkt, mut worst_dev) = (0.0f64, 0.0f64);
    let mut solver_secs = 0.0;
    let start = Instant::now();
    for _ in 0..500 {
        let k = rng.gen_range(2..=10);
        let spec = random_spec(&mut rng, k);
        let losses: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..20.0)).collect();
        let t0 = Instant::now();
        let q = solve_separable(&losses, &spec).unwrap();
        solver_secs += t0.elapsed().as_secs_f64();
        worst_kkt = worst_kkt.max(kkt_residual(&q, &losses, &spec).unwrap());
        let oracle = projected_newton_oracle(&losses, spec.terms());
        worst_dev = worst_dev.max(max_dev(q.as_slice(), &oracle));
    }
    let total = start.elapsed().as_secs_f64();
    Verdict::new(
        worst_kkt < 1e-8 && worst_dev < 1e-5 && total < 10.0,
        format!(
            "500 instances, max KKT residual {worst_kkt:.2e} (< 1e-8), max deviation from primal oracle {worst_dev:.2e} (< 1e-5), solver {solver_secs:.3}s, total {total:.2}s (< 10s)"
        ),
    )
}

fn criterion_2() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut worst = 0.0f64;
    let mut checked = 0;
    for _ in 0..200 {
        let k = rng.gen_range(2..=10);
        let p_edge = rng.gen_range(0.1..0.9);
        let edges: Vec<(usize, usize)> = (0..k)
            .flat_map(|i| (0..k).map(move |j| (i, j)))
            .filter(|_| rng.gen_bool(p_edge))
            .collect();
        let g = FeedbackGraph::new(k, edges).unwrap();
        let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
        let z: f64 = w.iter().sum();
        let p = SimplexPoint::new(w.iter().map(|x| x / z).collect()).unwrap();
        let losses: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..1.0)).collect();
        let obs_p = observation_probabilities(&g, &p);
        let mut mean = vec![0.0; k];
        for j in 0..k {
            let est = estimate_losses(&g, &p, &RoundObservation::reveal(&g, j, &losses).unwrap()).unwrap();
            for i in 0..k {
                mean[i] += p[j] * est.values[i];
            }
        }
        for i in (0..k).filter(|&i| obs_p[i] > 0.0) {
            worst = worst.max((mean[i] - losses[i]).abs());
            checked += 1;
        }
    }
    Verdict::new(
        worst < 1e-12,
        format!("200 triples, {checked} observable coordinates, max |E[estimate] - loss| = {worst:.2e} (< 1e-12)"),
    )
}

fn criterion_3() -> Verdict {
    let corpus = fuzz_corpus(300, 103);
    let mut greedy_bad = 0;
    let mut delta_mismatch = 0;
    let mut alpha_mismatch = 0;
    let mut weak_instances = 0;
    let mut stated_violations = 0;
    let mut corrected_violations = 0;
    let mut example = None;
    for g in &corpus {
        if independence_number(g, AlphaMode::default()).unwrap().exact != Some(brute_alpha(g)) {
            alpha_mismatch += 1;
        }
        for def in [DominationTarget::NoSelfLoop, DominationTarget::WeaklyObservable] {
            let lib = weakly_dominating_set_exact(g, def, 16).ok().map(|d| d.len());
            if lib != brute_delta(g, def) {
                delta_mismatch += 1;
            }
            if let Ok(d) = weakly_dominating_set_greedy(g, def) {
                if !covers_targets(g, &d, def) {
                    greedy_bad += 1;
                }
            }
        }
        if !is_weakly_observable(g) {
            continue;
        }
        weak_instances += 1;
        let d = brute_delta(g, DominationTarget::NoSelfLoop).unwrap();
        let dp = brute_delta(g, DominationTarget::WeaklyObservable).unwrap();
        let stated = d <= dp && dp <= d + 1 && (d < 2 || d == dp);
        if !stated {
            stated_violations += 1;
            example.get_or_insert((g.num_arms(), d, dp));
        }
        let corrected = dp <= d && d <= dp + 1 && (dp < 2 || d == dp);
        if !corrected {
            corrected_violations += 1;
        }
    }
    let mut v = Verdict::new(
        greedy_bad == 0 && delta_mismatch == 0 && alpha_mismatch == 0 && stated_violations == 0,
        format!(
            "{} graphs: greedy cover failures {greedy_bad}, exact delta disagreements {delta_mismatch}, exact alpha disagreements {alpha_mismatch}; relation delta <= delta' <= delta + 1 violated on {stated_violations} of {weak_instances} weakly observable graphs",
            corpus.len()
        ),
    );
    if let Some((k, d, dp)) = example {
        v.diagnostics.push(format!("first violation: K = {k}, delta = {d}, delta' = {dp}"));
    }
    v.diagnostics.push(format!(
        "reverse relation delta' <= delta <= delta' + 1 (equal when delta' >= 2) violated on {corrected_violations} of {weak_instances}"
    ));
    v
}

fn criterion_4() -> Verdict {
    let g = parse_graph_spec("bandit:5").unwrap();
    let script = estimate_script(5, 100, 104);
    let c1 = graphftrl::policy::recommended_c1(5, 5, 1e4).unwrap();
    let expected = strong_oracle(5, c1, &script);
    let mut policy = StrongPolicy::new(&g, c1).unwrap();
    let mut strong_dev = 0.0f64;
    for (row, est) in expected.iter().zip(&script) {
        let plan = policy.next_round().unwrap();
        strong_dev = strong_dev.max((plan.beta - row.beta).abs()).max((plan.gamma - row.gamma).abs());
        policy.update(&as_estimate(est)).unwrap();
    }

    let g = parse_graph_spec("revealing_action:5").unwrap();
    let a = analyze(&g, &AnalysisOptions::default()).unwrap();
    let params = recommended_weak_params(a.dominating_set.len(), 5, 1e4).unwrap();
    let expected = weak_oracle(5, &a.v1, &a.v2, a.dominating_set.len(), params.c1, params.c2, None, &script);
    let mut policy = WeakPolicy::new(&g, &a, params).unwrap();
    let mut weak_dev = 0.0f64;
    for (row, est) in expected.iter().zip(&script) {
        let plan = policy.next_round().unwrap();
        weak_dev = weak_dev
            .max((plan.beta - row.beta).abs())
            .max((plan.gamma_prime.unwrap() - row.gamma_prime).abs())
            .max((plan.gamma - row.gamma).abs());
        policy.update(&as_estimate(est)).unwrap();
    }

    let g = parse_graph_spec("bandit:2").unwrap();
    let mut policy = StrongPolicy::new(&g, 1.0).unwrap();
    policy.next_round().unwrap();
    policy.update(&as_estimate(&[0.0, 0.0])).unwrap();
    let beta2 = policy.beta();
    let hand = 1.0 + 1.0 / 2f64.sqrt();
    Verdict::new(
        strong_dev < 1e-10 && weak_dev < 1e-10 && beta2 == hand,
        format!(
            "100 rounds: strong max deviation {strong_dev:.2e}, weak max deviation {weak_dev:.2e} (< 1e-10); beta_2 = {beta2:?} vs 1 + 1/sqrt(2) = {hand:?}"
        ),
    )
}

/// Per-round and end-of-run invariants on a full trace.
fn trace_violations(trace: &Trace, weak: bool) -> Vec<String> {
    let mut out: Vec<String> = trace.violations.clone();
    let i_star = reference_arm(trace);
    let mut prev: Option<(f64, Option<f64>)> = None;
    for r in &trace.rounds {
        if r.gamma > 0.5 + 1e-15 {
            out.push(format!("t={}: gamma {}", r.t, r.gamma));
        }
        if let Some((b, b2)) = prev {
            if r.beta < b || matches!((b2, r.beta2), (Some(x), Some(y)) if y < x) {
                out.push(format!("t={}: beta decreased", r.t));
            }
        }
        prev = Some((r.beta, r.beta2));
        if weak && r.a + 1e-12 < r.b.unwrap() {
            out.push(format!("t={}: a = {} < b = {}", r.t, r.a, r.b.unwrap()));
        }
        let q = SimplexPoint::new(r.q.clone().unwrap()).unwrap();
        if r.entropy > entropy_upper_bound(&q, i_star) + 1e-12 {
            out.push(format!("t={}: entropy bound", r.t));
        }
    }
    out.extend(lemma_checks(trace, i_star));
    out
}

fn criterion_5() -> Verdict {
    let graphs = [
        ("bandit:5", "strong"),
        ("full_feedback:5", "strong"),
        ("loopless_clique:5", "strong"),
        ("random:6:0.4:5", "strong"),
        ("revealing_action:5", "weak"),
        ("mixed_revealing:6:2", "weak"),
    ];
    let mut runs = 0;
    let mut failures: Vec<String> = Vec::new();
    for (spec, algo) in graphs {
        let k = parse_graph_spec(spec).unwrap().num_arms();
        let means: Vec<String> = (0..k)
            .map(|i| if i == 1 { "0.3".into() } else { format!("{}", 0.5 + 0.02 * i as f64) })
            .collect();
        let means = means.join(",");
        let envs = [
            format!(r#"{{"kind": "stochastic", "means": [{means}]}}"#),
            format!(
                r#"{{"kind": "corrupted", "base": {{"means": [{means}]}}, "budget": 100, "strategy": "flip_optimal_prefix"}}"#
            ),
            r#"{"kind": "adversarial", "schedule": {"alternating_blocks": {"period": 500}}}"#.to_string(),
        ];
        for env in envs {
            let json = format!(
                r#"{{"graph": {{"spec": "{spec}"}}, "policy": {{"algorithm": "{algo}"}}, "environment": {env},
                    "run": {{"horizon": 10000, "seeds": [0,1,2,3,4], "trace": "full", "check_invariants": true}}}}"#
            );
            let r = resolved(&json, &[]);
            for trace in run_seeds(&r, 0).unwrap() {
                let trace = trace.unwrap();
                runs += 1;
                let found = trace_violations(&trace, algo == "weak");
                if let Some(first) = found.first() {
                    failures.push(format!("{spec} seed {}: {first}", trace.seed));
                }
            }
        }
    }
    let mut v = Verdict::new(
        failures.is_empty(),
        format!("{runs} runs of 10^4 rounds, {} with violations", failures.len()),
    );
    v.diagnostics.extend(failures.into_iter().take(5));
    v
}

const C6_CONFIG: &str = r#"{"graph": {"spec": "bandit:5"}, "policy": {"algorithm": "strong"},
    "environment": {"kind": "stochastic", "means": [0.3, 0.5, 0.5, 0.5, 0.5]},
    "run": {"horizon": 1000, "seeds": SEEDS, "trace": "none"}}"#;

fn scaling(json: &str, horizons: &[u64], extra: &[&str]) -> Vec<(f64, f64, f64)> {
    horizons
        .iter()
        .map(|&t| {
            let mut o = vec![format!("run.horizon={t}")];
            o.extend(extra.iter().map(|s| s.to_string()));
            let refs: Vec<&str> = o.iter().map(String::as_str).collect();
            let (m, s) = regret_stats(&resolved(json, &refs));
            (t as f64, m, s)
        })
        .collect()
}

fn slope_of(points: &[(f64, f64, f64)]) -> f64 {
    let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.0, p.1)).collect();
    loglog_slope(&xy).unwrap_or(f64::NAN)
}

fn fmt_points(points: &[(f64, f64, f64)]) -> String {
    points
        .iter()
        .map(|(t, m, s)| format!("T={t:.0}: {m:.1} +- {s:.1}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn criterion_6() -> Verdict {
    let json = C6_CONFIG.replace("SEEDS", SEEDS_20);
    let start = Instant::now();
    let points = scaling(&json, &[1_000, 10_000, 100_000], &[]);
    let secs = start.elapsed().as_secs_f64();
    let slope = slope_of(&points);
    let c1 = resolved(&json, &["run.horizon=100000"]).policy.c1.unwrap_or(f64::NAN);
    let mut v = Verdict::new(
        slope < 0.5 && secs < 300.0,
        format!(
            "recommended c1 (T = 10^5: {c1:.3}); {}; log-log slope {slope:.3} (< 0.5); {secs:.1}s (< 300s)",
            fmt_points(&points)
        ),
    );
    let low = scaling(&json, &[1_000, 10_000, 100_000], &["policy.c1=1"]);
    v.diagnostics.push(format!(
        "diagnostic, c1 = 1: {}; slope {:.3}",
        fmt_points(&low),
        slope_of(&low)
    ));
    v
}

fn criterion_7() -> Verdict {
    let json = format!(
        r#"{{"graph": {{"spec": "bandit:10"}}, "policy": {{"algorithm": "strong"}},
            "environment": {{"kind": "stochastic", "means": [0.3,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5]}},
            "run": {{"horizon": 30000, "seeds": {SEEDS_20}, "trace": "none"}}}}"#
    );
    let (mb, sb) = regret_stats(&resolved(&json, &[]));
    let (mf, sf) = regret_stats(&resolved(&json, &["graph.spec=\"full_feedback:10\""]));
    Verdict::new(
        mf < mb && mf + sf < mb - sb,
        format!("T = 3*10^4: full_feedback(10) {mf:.1} +- {sf:.1}, bandit(10) {mb:.1} +- {sb:.1}"),
    )
}

fn criterion_8() -> Verdict {
    let json = format!(
        r#"{{"graph": {{"spec": "revealing_action:5"}}, "policy": {{"algorithm": "weak"}},
            "environment": {{"kind": "stochastic", "means": [0.5, 0.2, 0.5, 0.5, 0.5]}},
            "run": {{"horizon": 10000, "seeds": {SEEDS_20}, "trace": "none"}}}}"#
    );
    let start = Instant::now();
    let points = scaling(&json, &[10_000, 100_000], &[]);
    let secs = start.elapsed().as_secs_f64();
    let ratio = points[1].1 / points[0].1;
    let bound = 10f64.powf(2.0 / 3.0) * 1.5;
    let slope = slope_of(&points);
    let p = resolved(&json, &["run.horizon=100000"]).policy;
    let mut v = Verdict::new(
        ratio < bound && slope < 2.0 / 3.0 && secs < 600.0,
        format!(
            "recommended c1 = {:.3}, c2 = {:.3} at T = 10^5; {}; ratio {ratio:.3} (< {bound:.3}); slope {slope:.3} (< 0.667); {secs:.1}s (< 600s)",
            p.c1.unwrap_or(f64::NAN),
            p.c2.unwrap_or(f64::NAN),
            fmt_points(&points)
        ),
    );
    let c1_min = format!("policy.c1={}", 2.0 * 5f64.ln());
    let low = scaling(&json, &[10_000, 100_000], &[&c1_min, "policy.c2=1"]);
    v.diagnostics.push(format!(
        "diagnostic, c1 = 2 ln K, c2 = 1: {}; ratio {:.3}; slope {:.3}",
        fmt_points(&low),
        low[1].1 / low[0].1,
        slope_of(&low)
    ));
    v
}

fn criterion_9() -> Verdict {
    let json = format!(
        r#"{{"graph": {{"spec": "bandit:5"}}, "policy": {{"algorithm": "strong"}},
            "environment": {{"kind": "corrupted", "base": {{"means": [0.3, 0.5, 0.5, 0.5, 0.5]}}, "budget": 0, "strategy": "flip_optimal_prefix"}},
            "run": {{"horizon": 30000, "seeds": {SEEDS_20}, "trace": "none"}}}}"#
    );
    let stats: Vec<(f64, f64, f64)> = [0.0, 50.0, 200.0]
        .iter()
        .map(|&c| {
            let o = format!("environment.budget={c}");
            let (m, s) = regret_stats(&resolved(&json, &[&o]));
            (c, m, s)
        })
        .collect();
    let monotone = stats.windows(2).all(|w| w[1].1 >= w[0].1);
    let envelope = 5.0 * stats[0].1 + 2.0 * 200.0;
    let within = stats[2].1 <= envelope;
    let line = stats
        .iter()
        .map(|(c, m, s)| format!("C={c:.0}: {m:.1} +- {s:.1}"))
        .collect::<Vec<_>>()
        .join(", ");
    Verdict::new(
        monotone && within,
        format!("T = 3*10^4: {line}; non-decreasing {monotone}; C=200 within 5 R(0) + 2C = {envelope:.1}: {within}"),
    )
}

fn canary_clean<P: Policy>(policy: P, g: &FeedbackGraph, seed: u64) -> bool {
    let last_p = Arc::new(Mutex::new(None));
    let seen = Arc::new(Mutex::new(Vec::new()));
    let mut spy = Spy {
        inner: policy,
        last_p: last_p.clone(),
        seen: seen.clone(),
    };
    let mut canary = Canary {
        graph: g.clone(),
        seed,
        last_p,
        chosen: Vec::new(),
    };
    let opts = EpisodeOptions {
        horizon: 500,
        seed,
        detail: TraceDetail::Summary,
        check_invariants: false,
    };
    let Ok(trace) = run_with(&mut spy, g, &mut canary, &GroundTruth::NoCertificate, &opts) else {
        return false;
    };
    let seen = seen.lock().unwrap();
    seen.len() == 500
        && seen.iter().zip(&trace.rounds).zip(&canary.chosen).all(|((est, rec), &arm)| {
            arm == rec.arm
                && est
                    .values
                    .iter()
                    .enumerate()
                    .all(|(j, v)| v.is_finite() && (g.has_edge(arm, j) || *v == 0.0))
        })
}

fn criterion_10() -> Verdict {
    let json = r#"{"graph": {"spec": "mixed_revealing:6:2"}, "policy": {"algorithm": "weak"},
        "environment": {"kind": "corrupted", "base": {"means": [0.4, 0.3, 0.5, 0.6, 0.7, 0.8]}, "budget": 20, "strategy": {"periodic_swap": {"period": 7}}},
        "run": {"horizon": 2000, "seeds": [0, 1, 2], "trace": "full", "check_invariants": true},
        "sweep": {"grid": {"policy.algorithm": ["weak", "weak_alt"]}}}"#;
    let r = resolved(json, &[]);
    let identical = (0..3).all(|s| run_episode(&r, s).unwrap() == run_episode(&r, s).unwrap());
    let cfg = RunConfig::from_json(json).unwrap();
    let parallel = sweep(&cfg, 1).unwrap() == sweep(&cfg, 4).unwrap();

    let mut canary = true;
    for spec in ["bandit:5", "loopless_clique:5", "total_order:5"] {
        let g = parse_graph_spec(spec).unwrap();
        canary &= canary_clean(StrongPolicy::new(&g, 1.0).unwrap(), &g, 9);
    }
    for spec in ["revealing_action:5", "mixed_revealing:6:2"] {
        let g = parse_graph_spec(spec).unwrap();
        let a = analyze(&g, &AnalysisOptions::default()).unwrap();
        let params = recommended_weak_params(a.dominating_set.len(), g.num_arms(), 500.0).unwrap();
        canary &= canary_clean(WeakPolicy::new(&g, &a, params).unwrap(), &g, 10);
    }
    Verdict::new(
        identical && parallel && canary,
        format!("repeated runs bit-identical {identical}; sweep with 1 and 4 threads identical {parallel}; canary estimates clean {canary}"),
    )
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 10] = [
        ("FTRL solver correctness", criterion_1),
        ("estimator unbiasedness", criterion_2),
        ("graph oracles", criterion_3),
        ("recurrence fidelity", criterion_4),
        ("invariants on live traces", criterion_5),
        ("stochastic scaling, strong policy", criterion_6),
        ("graph dependence", criterion_7),
        ("weak-graph scaling", criterion_8),
        ("corruption robustness", criterion_9),
        ("determinism and hygiene", criterion_10),
    ];
    let mut failed = Vec::new();
    for (n, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Verdict::new(false, format!("panicked: {msg}"))
        });
        let tag = if verdict.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {tag} [{name}] {} ({:.1}s)",
            n + 1,
            verdict.detail,
            start.elapsed().as_secs_f64()
        );
        for d in &verdict.diagnostics {
            println!("             {d}");
        }
        if !verdict.pass {
            failed.push(n + 1);
        }
    }
    println!(
        "acceptance: {} of {} criteria passed; failed: {:?}",
        criteria.len() - failed.len(),
        criteria.len(),
        failed
    );
    if !failed.is_empty() && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
