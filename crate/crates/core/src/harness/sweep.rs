use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{resolve, ResolvedConfig, RunConfig};
use super::episode::{run_episode, Trace};
use super::regret::{final_regret, lemma_checks, loglog_slope, mean_stderr, reference_arm};
use crate::error::{Error, Result};

/// One `(config, seed)` result. Failed runs keep their identifiers and
/// carry the error message instead of numbers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub config_id: usize,
    pub label: String,
    pub seed: u64,
    pub horizon: u64,
    pub final_regret: Option<f64>,
    pub final_q: Option<f64>,
    pub clip_events: Option<u64>,
    pub cumulative_loss: Option<f64>,
    pub entropy_sum: Option<f64>,
    pub violations: Option<usize>,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn from_trace(config_id: usize, label: &str, resolved: &ResolvedConfig, trace: &Trace) -> Self {
        let truth = resolved.config.environment.ground_truth();
        let reference = reference_arm(trace);
        let mut violations = trace.violation_count;
        if resolved.config.run.check_invariants {
            if let Some(i) = trace.i_star {
                violations += lemma_checks(trace, i).len();
            }
        }
        Self {
            config_id,
            label: label.to_string(),
            seed: trace.seed,
            horizon: trace.totals.horizon,
            final_regret: Some(final_regret(trace, &truth)),
            final_q: Some(trace.totals.q_missing[reference]),
            clip_events: Some(trace.totals.clip_events),
            cumulative_loss: Some(trace.totals.cumulative_loss),
            entropy_sum: Some(trace.totals.entropy_sum),
            violations: Some(violations),
            error: None,
        }
    }

    fn failed(config_id: usize, label: &str, seed: u64, horizon: u64, err: &Error) -> Self {
        Self {
            config_id,
            label: label.to_string(),
            seed,
            horizon,
            final_regret: None,
            final_q: None,
            clip_events: None,
            cumulative_loss: None,
            entropy_sum: None,
            violations: None,
            error: Some(err.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub config_id: usize,
    pub label: String,
    /// The label without its horizon component; cells of one family differ
    /// only in `T`.
    pub family: String,
    pub horizon: u64,
    pub runs: usize,
    pub failures: usize,
    pub mean_regret: f64,
    pub stderr_regret: f64,
    pub mean_q: f64,
    pub stderr_q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub family: String,
    /// Least-squares slope of `ln(mean regret)` against `ln T`.
    pub slope: f64,
    pub points: Vec<(u64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub cells: Vec<CellSummary>,
    pub fits: Vec<ScalingFit>,
}

/// A thread pool with `jobs` workers; 0 picks the rayon default.
pub fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// Runs every seed of one resolved config, in seed order.
pub fn run_seeds(resolved: &ResolvedConfig, jobs: usize) -> Result<Vec<Result<Trace>>> {
    let pool = thread_pool(jobs)?;
    Ok(pool.install(|| {
        resolved
            .config
            .run
            .seeds
            .par_iter()
            .map(|&seed| run_episode(resolved, seed))
            .collect()
    }))
}

fn family_of(label: &str) -> String {
    label
        .split(',')
        .filter(|part| !part.starts_with("run.horizon="))
        .collect::<Vec<_>>()
        .join(",")
}

/// Expands the sweep grid, resolves each cell and runs every seed. Cells
/// that fail to resolve or runs that fail are recorded as error rows.
pub fn sweep(config: &RunConfig, jobs: usize) -> Result<SweepTable> {
    let cells = config.expand_grid()?;
    let resolved: Vec<(String, RunConfig, Result<ResolvedConfig>)> = cells
        .into_iter()
        .map(|(label, cfg)| {
            let r = resolve(&cfg);
            (label, cfg, r)
        })
        .collect();
    let tasks: Vec<(usize, u64)> = resolved
        .iter()
        .enumerate()
        .flat_map(|(id, (_, cfg, _))| cfg.run.seeds.iter().map(move |&s| (id, s)))
        .collect();
    let pool = thread_pool(jobs)?;
    let rows: Vec<SweepRow> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(id, seed)| {
                let (label, cfg, res) = &resolved[id];
                let outcome = res
                    .as_ref()
                    .map_err(Clone::clone)
                    .and_then(|r| run_episode(r, seed).map(|trace| (r, trace)));
                match outcome {
                    Ok((r, trace)) => SweepRow::from_trace(id, label, r, &trace),
                    Err(e) => {
                        log::warn!("config {id} ({label}) seed {seed} failed: {e}");
                        SweepRow::failed(id, label, seed, cfg.run.horizon, &e)
                    }
                }
            })
            .collect()
    });
    Ok(summarize(rows))
}

/// Per-cell aggregates and per-family scaling fits.
pub fn summarize(rows: Vec<SweepRow>) -> SweepTable {
    let mut by_cell: BTreeMap<usize, Vec<&SweepRow>> = BTreeMap::new();
    for row in &rows {
        by_cell.entry(row.config_id).or_default().push(row);
    }
    let cells: Vec<CellSummary> = by_cell
        .into_iter()
        .map(|(config_id, cell)| {
            let ok: Vec<&&SweepRow> = cell.iter().filter(|r| r.error.is_none()).collect();
            let regrets: Vec<f64> = ok.iter().filter_map(|r| r.final_regret).collect();
            let qs: Vec<f64> = ok.iter().filter_map(|r| r.final_q).collect();
            let (mean_regret, stderr_regret) = mean_stderr(&regrets);
            let (mean_q, stderr_q) = mean_stderr(&qs);
            CellSummary {
                config_id,
                label: cell[0].label.clone(),
                family: family_of(&cell[0].label),
                horizon: cell[0].horizon,
                runs: cell.len(),
                failures: cell.len() - ok.len(),
                mean_regret,
                stderr_regret,
                mean_q,
                stderr_q,
            }
        })
        .collect();

    let mut families: BTreeMap<&str, Vec<(u64, f64)>> = BTreeMap::new();
    for c in &cells {
        if c.failures < c.runs {
            families.entry(&c.family).or_default().push((c.horizon, c.mean_regret));
        }
    }
    let fits = families
        .into_iter()
        .filter_map(|(family, mut points)| {
            points.sort_by_key(|p| p.0);
            let xy: Vec<(f64, f64)> = points.iter().map(|&(t, r)| (t as f64, r)).collect();
            loglog_slope(&xy).map(|slope| ScalingFit {
                family: family.to_string(),
                slope,
                points,
            })
        })
        .collect();
    SweepTable { rows, cells, fits }
}
