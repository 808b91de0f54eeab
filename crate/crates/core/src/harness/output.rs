//! CSV and JSON artifacts. Numbers are written with Rust's shortest
//! round-trip formatting so identical runs produce identical bytes.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::config::ResolvedConfig;
use super::episode::Trace;
use super::sweep::{CellSummary, ScalingFit, SweepRow};
use crate::error::{Error, Result};

pub const RESULTS_HEADER: [&str; 11] = [
    "config_id",
    "seed",
    "T",
    "final_regret",
    "final_Q",
    "clip_events",
    "cumulative_loss",
    "entropy_sum",
    "violations",
    "label",
    "error",
];

pub const CELLS_HEADER: [&str; 9] = [
    "config_id",
    "label",
    "T",
    "runs",
    "failures",
    "mean_regret",
    "stderr_regret",
    "mean_Q",
    "stderr_Q",
];

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn to_csv(header: &[String], records: impl Iterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in records {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn owned(header: &[&str]) -> Vec<String> {
    header.iter().map(|s| s.to_string()).collect()
}

pub fn results_csv(rows: &[SweepRow]) -> Result<String> {
    to_csv(
        &owned(&RESULTS_HEADER),
        rows.iter().map(|r| {
            vec![
                r.config_id.to_string(),
                r.seed.to_string(),
                r.horizon.to_string(),
                opt(r.final_regret),
                opt(r.final_q),
                opt(r.clip_events),
                opt(r.cumulative_loss),
                opt(r.entropy_sum),
                opt(r.violations),
                r.label.clone(),
                r.error.clone().unwrap_or_default(),
            ]
        }),
    )
}

pub fn cells_csv(cells: &[CellSummary]) -> Result<String> {
    to_csv(
        &owned(&CELLS_HEADER),
        cells.iter().map(|c| {
            vec![
                c.config_id.to_string(),
                c.label.clone(),
                c.horizon.to_string(),
                c.runs.to_string(),
                c.failures.to_string(),
                c.mean_regret.to_string(),
                c.stderr_regret.to_string(),
                c.mean_q.to_string(),
                c.stderr_q.to_string(),
            ]
        }),
    )
}

/// `t,arm,loss,gamma,beta,entropy,q_istar`, followed by `q1..qK,p1..pK`
/// when the trace carries full distributions. Arms are 1-indexed.
pub fn trace_csv(trace: &Trace) -> Result<String> {
    let full = trace.rounds.first().is_some_and(|r| r.q.is_some());
    let mut header = owned(&["t", "arm", "loss", "gamma", "beta", "entropy", "q_istar"]);
    if full {
        header.extend((1..=trace.num_arms).map(|i| format!("q{i}")));
        header.extend((1..=trace.num_arms).map(|i| format!("p{i}")));
    }
    to_csv(
        &header,
        trace.rounds.iter().map(|r| {
            let mut rec = vec![
                r.t.to_string(),
                (r.arm + 1).to_string(),
                r.loss.to_string(),
                r.gamma.to_string(),
                r.beta.to_string(),
                r.entropy.to_string(),
                opt(r.q_istar),
            ];
            for v in [&r.q, &r.p].into_iter().flatten() {
                rec.extend(v.iter().map(f64::to_string));
            }
            rec
        }),
    )
}

/// Writes through a temporary file in the destination directory and
/// renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error.to_string()))?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct RunSummary<'a> {
    pub resolved: &'a ResolvedConfig,
    pub results: &'a [SweepRow],
    pub mean_regret: f64,
    pub stderr_regret: f64,
}

#[derive(Debug, Serialize)]
pub struct SweepSummary<'a> {
    pub cells: &'a [CellSummary],
    pub fits: &'a [ScalingFit],
    pub failures: usize,
}
