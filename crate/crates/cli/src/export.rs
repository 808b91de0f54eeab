//! Exports of a `results.csv` table.

use std::collections::HashMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use graphftrl::harness::{cells_csv, summarize, write_atomic, SweepRow};

use crate::{CmdResult, Failure};

/// Columns the exports read.
const REQUIRED: [&str; 5] = ["config_id", "seed", "T", "final_regret", "label"];

fn read_rows(path: &Path) -> anyhow::Result<Vec<SweepRow>> {
    let mut reader =
        csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let index: HashMap<&str, usize> = headers.iter().enumerate().map(|(i, h)| (h, i)).collect();
    let missing: Vec<&str> = REQUIRED
        .iter()
        .copied()
        .filter(|c| !index.contains_key(c))
        .collect();
    if !missing.is_empty() {
        bail!("{} lacks column(s) {}", path.display(), missing.join(", "));
    }
    let mut rows = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let record = record?;
        let field = |name: &str| index.get(name).map(|&i| record[i].trim().to_string());
        let num = |name: &str| -> anyhow::Result<Option<f64>> {
            match field(name).filter(|s| !s.is_empty()) {
                Some(s) => Ok(Some(s.parse().map_err(|_| {
                    anyhow!("line {}: column {name} has non-numeric value {s:?}", n + 2)
                })?)),
                None => Ok(None),
            }
        };
        let int = |name: &str| -> anyhow::Result<u64> {
            let s = field(name).unwrap_or_default();
            s.parse()
                .map_err(|_| anyhow!("line {}: column {name} has bad value {s:?}", n + 2))
        };
        let error = field("error").filter(|s| !s.is_empty());
        rows.push(SweepRow {
            config_id: int("config_id")? as usize,
            label: field("label").unwrap_or_default(),
            seed: int("seed")?,
            horizon: int("T")?,
            final_regret: num("final_regret")?,
            final_q: num("final_Q")?,
            clip_events: num("clip_events")?.map(|x| x as u64),
            cumulative_loss: num("cumulative_loss")?,
            entropy_sum: num("entropy_sum")?,
            violations: num("violations")?.map(|x| x as usize),
            error,
        });
    }
    if rows.is_empty() {
        bail!("{} has no result rows", path.display());
    }
    Ok(rows)
}

pub fn csv(results: &Path, out: &Path) -> CmdResult {
    let rows = read_rows(results).map_err(Failure::parse)?;
    let table = summarize(rows);
    write_atomic(out, cells_csv(&table.cells)?.as_bytes())?;
    println!("wrote {} ({} configs)", out.display(), table.cells.len());
    Ok(())
}

const PLOT_TEMPLATE: &str = r#"#!/usr/bin/env python3
"""Plot mean final regret against the horizon T with standard-error bars.

Usage: python3 plot_regret.py [results.csv] [output.png]
"""
import csv
import math
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

RESULTS = sys.argv[1] if len(sys.argv) > 1 else __RESULTS__
OUTPUT = sys.argv[2] if len(sys.argv) > 2 else "regret_vs_T.png"


def family(label):
    return ",".join(p for p in label.split(",") if p and not p.startswith("run.horizon="))


groups = defaultdict(lambda: defaultdict(list))
with open(RESULTS, newline="") as fh:
    for row in csv.DictReader(fh):
        if row.get("error") or row["final_regret"] == "":
            continue
        groups[family(row["label"]) or "run"][int(row["T"])].append(float(row["final_regret"]))

fig, ax = plt.subplots(figsize=(6, 4))
for name, by_t in sorted(groups.items()):
    ts = sorted(by_t)
    means, errs = [], []
    for t in ts:
        xs = by_t[t]
        m = sum(xs) / len(xs)
        var = sum((x - m) ** 2 for x in xs) / (len(xs) - 1) if len(xs) > 1 else 0.0
        means.append(m)
        errs.append(math.sqrt(var / len(xs)))
    ax.errorbar(ts, means, yerr=errs, marker="o", capsize=3, label=name)
ax.set_xscale("log")
ax.set_yscale("log")
ax.set_xlabel("T")
ax.set_ylabel("mean final regret")
ax.legend(fontsize="small")
fig.tight_layout()
fig.savefig(OUTPUT, dpi=150)
print("wrote", OUTPUT)
"#;

pub fn plot_script(results: &Path, out: &Path) -> CmdResult {
    // Validate the table first so a broken input leaves no script behind.
    read_rows(results).map_err(Failure::parse)?;
    let path = results
        .canonicalize()
        .with_context(|| format!("resolving {}", results.display()))
        .map_err(Failure::runtime)?;
    let literal = serde_json::to_string(&path.to_string_lossy()).map_err(Failure::runtime)?;
    let script = PLOT_TEMPLATE.replace("__RESULTS__", &literal);
    write_atomic(out, script.as_bytes())?;
    println!("wrote {}", out.display());
    Ok(())
}
