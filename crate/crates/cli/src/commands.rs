use std::path::Path;

use anyhow::Context;
use graphftrl::harness::{
    mean_stderr, resolve, results_csv, run_seeds, sweep as run_sweep, trace_csv, write_atomic,
    cells_csv, RunConfig, RunSummary, SweepRow, SweepSummary, TraceDetail,
};

use crate::{CmdResult, Failure};

fn load(path: &Path, overrides: &[String]) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::parse)?;
    Ok(RunConfig::from_json_with_overrides(&text, overrides)?)
}

fn write(path: &Path, contents: &str) -> CmdResult {
    write_atomic(path, contents.as_bytes())
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::runtime)
}

fn json(value: &impl serde::Serialize) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(Failure::runtime)?;
    s.push('\n');
    Ok(s)
}

pub fn validate(path: &Path, overrides: &[String]) -> CmdResult {
    let config = load(path, overrides)?;
    let cells = config.expand_grid()?;
    let mut resolved = Vec::with_capacity(cells.len());
    for (label, cfg) in &cells {
        let r = resolve(cfg).map_err(|e| {
            let mut f = Failure::from(e);
            if !label.is_empty() {
                f.error = f.error.context(format!("sweep cell {label}"));
            }
            f
        })?;
        resolved.push(serde_json::json!({ "label": label, "resolved": r }));
    }
    print!("{}", json(&resolved)?);
    Ok(())
}

pub fn run(
    path: &Path,
    overrides: &[String],
    seed: Option<u64>,
    jobs: usize,
    out: &Path,
    trace: Option<TraceDetail>,
) -> CmdResult {
    let mut config = load(path, overrides)?;
    if let Some(s) = seed {
        config.run.seeds = vec![s];
    }
    if let Some(t) = trace {
        config.run.trace = t;
    }
    if !config.sweep.is_empty() {
        log::warn!("ignoring the sweep section; use `sweep` to run the grid");
        config.sweep = Default::default();
    }
    let resolved = resolve(&config)?;
    for w in &resolved.warnings {
        eprintln!("warning: {w}");
    }
    let traces = run_seeds(&resolved, jobs)?;
    let mut rows = Vec::with_capacity(traces.len());
    let mut ok = Vec::with_capacity(traces.len());
    for (seed, trace) in config.run.seeds.iter().zip(traces) {
        let trace = trace
            .map_err(Failure::from)
            .map_err(|mut f| {
                f.error = f.error.context(format!("seed {seed}"));
                f
            })?;
        rows.push(SweepRow::from_trace(0, "", &resolved, &trace));
        ok.push(trace);
    }

    let regrets: Vec<f64> = rows.iter().filter_map(|r| r.final_regret).collect();
    let (mean_regret, stderr_regret) = mean_stderr(&regrets);
    write(&out.join("results.csv"), &results_csv(&rows)?)?;
    if config.run.trace != TraceDetail::None {
        for trace in &ok {
            write(&out.join(format!("trace_seed{}.csv", trace.seed)), &trace_csv(trace)?)?;
        }
    }
    let summary = RunSummary {
        resolved: &resolved,
        results: &rows,
        mean_regret,
        stderr_regret,
    };
    write(&out.join("summary.json"), &json(&summary)?)?;

    for row in &rows {
        println!(
            "seed {}: final_regret {} (violations {})",
            row.seed,
            row.final_regret.unwrap_or(f64::NAN),
            row.violations.unwrap_or(0)
        );
    }
    println!("final_regret mean {mean_regret} stderr {stderr_regret}");
    Ok(())
}

pub fn sweep(path: &Path, overrides: &[String], jobs: usize, out: &Path) -> CmdResult {
    let config = load(path, overrides)?;
    // Reject configs whose grid cannot even be expanded before any work.
    config.expand_grid()?;
    let table = run_sweep(&config, jobs)?;
    let failures = table.rows.iter().filter(|r| r.error.is_some()).count();
    if failures == table.rows.len() {
        let first = table.rows[0].error.clone().unwrap_or_default();
        return Err(Failure::runtime(anyhow::anyhow!(
            "every run failed; first error: {first}"
        )));
    }
    write(&out.join("results.csv"), &results_csv(&table.rows)?)?;
    write(&out.join("cells.csv"), &cells_csv(&table.cells)?)?;
    let summary = SweepSummary {
        cells: &table.cells,
        fits: &table.fits,
        failures,
    };
    write(&out.join("summary.json"), &json(&summary)?)?;

    for c in &table.cells {
        println!(
            "[{}] {} T={}: mean_regret {} stderr {} ({} runs, {} failed)",
            c.config_id, c.label, c.horizon, c.mean_regret, c.stderr_regret, c.runs, c.failures
        );
    }
    for f in &table.fits {
        println!("slope {} for {:?}", f.slope, f.family);
    }
    if failures > 0 {
        eprintln!("warning: {failures} runs failed; see the error column of results.csv");
    }
    Ok(())
}
