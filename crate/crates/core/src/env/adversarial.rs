use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::LossSource;
use crate::error::{Error, Result};

/// Deterministic oblivious loss schedules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// In block `b = (t - 1) / period`, arm `b mod K` has loss 0 and every
    /// other arm loss 1.
    AlternatingBlocks { period: u64 },
    /// Arm `i` interpolates linearly from `i / (K - 1)` at `t = 1` to
    /// `1 - i / (K - 1)` at `t = horizon`, then stays there.
    LinearDrift { horizon: u64 },
    /// CSV file with header `t,l1,...,lK` and rows `t = 1, 2, ...`.
    ScriptedFile { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversarialSpec {
    pub schedule: Schedule,
}

impl AdversarialSpec {
    pub fn new(schedule: Schedule) -> Self {
        Self { schedule }
    }

    pub(crate) fn validate(&self, k: usize) -> Result<()> {
        match &self.schedule {
            Schedule::AlternatingBlocks { period: 0 } => {
                Err(Error::BadParameter("block period must be positive".into()))
            }
            Schedule::LinearDrift { horizon } if *horizon < 2 => {
                Err(Error::BadParameter("drift horizon must be at least 2".into()))
            }
            Schedule::ScriptedFile { path } => load_script(path, k).map(|_| ()),
            _ => Ok(()),
        }
    }

    pub fn source(&self, k: usize) -> Result<AdversarialSource> {
        let script = match &self.schedule {
            Schedule::ScriptedFile { path } => Some(Arc::new(load_script(path, k)?)),
            _ => None,
        };
        Ok(AdversarialSource {
            schedule: self.schedule.clone(),
            k,
            script,
        })
    }
}

/// Rows of a loss script; row `t - 1` holds `l_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScriptedLosses {
    pub rows: Vec<Vec<f64>>,
}

pub fn load_script(path: &Path, k: usize) -> Result<ScriptedLosses> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        .clone();
    let expected: Vec<String> = std::iter::once("t".to_string())
        .chain((1..=k).map(|i| format!("l{i}")))
        .collect();
    if headers.iter().map(str::trim).ne(expected.iter().map(String::as_str)) {
        return Err(Error::Config(format!(
            "{}: header must be {}",
            path.display(),
            expected.join(",")
        )));
    }
    let mut rows = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let line = n + 2;
        let bad = |what: String| Error::Config(format!("{}:{line}: {what}", path.display()));
        let t: u64 = record[0]
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad round index {:?}", &record[0])))?;
        if t != n as u64 + 1 {
            return Err(bad(format!("expected round {}, found {t}", n + 1)));
        }
        let row = record
            .iter()
            .skip(1)
            .map(|field| match field.trim().parse::<f64>() {
                Ok(x) if (0.0..=1.0).contains(&x) => Ok(x),
                _ => Err(bad(format!("loss {field:?} is not a number in [0, 1]"))),
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(ScriptedLosses { rows })
}

#[derive(Debug, Clone)]
pub struct AdversarialSource {
    schedule: Schedule,
    k: usize,
    script: Option<Arc<ScriptedLosses>>,
}

impl LossSource for AdversarialSource {
    fn num_arms(&self) -> usize {
        self.k
    }

    fn losses(&mut self, t: u64) -> Result<Vec<f64>> {
        if t == 0 {
            return Err(Error::BadParameter("rounds are numbered from 1".into()));
        }
        let k = self.k;
        Ok(match &self.schedule {
            Schedule::AlternatingBlocks { period } => {
                let good = (((t - 1) / period) % k as u64) as usize;
                (0..k).map(|i| if i == good { 0.0 } else { 1.0 }).collect()
            }
            Schedule::LinearDrift { horizon } => {
                let s = ((t - 1) as f64 / (*horizon - 1) as f64).min(1.0);
                (0..k)
                    .map(|i| {
                        let w = i as f64 / (k - 1) as f64;
                        w * (1.0 - s) + (1.0 - w) * s
                    })
                    .collect()
            }
            Schedule::ScriptedFile { .. } => {
                let script = self.script.as_ref().expect("loaded with the source");
                script
                    .rows
                    .get((t - 1) as usize)
                    .cloned()
                    .ok_or(Error::ScriptExhausted {
                        len: script.rows.len(),
                        t,
                    })?
            }
        })
    }
}
