//! Run configuration: one JSON document with `graph`, `policy`,
//! `environment`, `run` and an optional `sweep` section.
//!
//! ```json
//! {
//!   "graph": {"spec": "bandit:5"},
//!   "policy": {"algorithm": "strong", "c1": "auto"},
//!   "environment": {"kind": "stochastic", "means": [0.3, 0.5, 0.5, 0.5, 0.5]},
//!   "run": {"horizon": 10000, "seeds": [0, 1, 2]}
//! }
//! ```
//!
//! [`resolve`] turns a config into concrete parameters; every `"auto"`
//! value is replaced by its recommended setting and echoed back in the
//! resolved form.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::env::EnvSpec;
use crate::error::{Error, Result};
use crate::graph::{
    analyze, graph_catalog, one_indexed, AnalysisOptions, CatalogGraph, DominatingChoice,
    DominationTarget, FeedbackGraph, GraphAnalysis, Observability,
};
use crate::policy::{
    exp3g_parameters, recommended_c1, recommended_weak_params, Exp3GPolicy, Policy, StrongPolicy,
    WeakAltParams, WeakAltPolicy, WeakParams, WeakPolicy,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub graph: GraphSection,
    pub policy: PolicySection,
    pub environment: EnvSpec,
    pub run: RunSection,
    #[serde(default, skip_serializing_if = "SweepSection::is_empty")]
    pub sweep: SweepSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    pub spec: CatalogGraph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Strong,
    Weak,
    WeakAlt,
    Exp3g,
}

impl PolicyKind {
    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Strong => "strong",
            PolicyKind::Weak => "weak",
            PolicyKind::WeakAlt => "weak_alt",
            PolicyKind::Exp3g => "exp3g",
        }
    }

    fn required_class(self) -> Observability {
        match self {
            PolicyKind::Strong | PolicyKind::Exp3g => Observability::StronglyObservable,
            PolicyKind::Weak | PolicyKind::WeakAlt => Observability::WeaklyObservable,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoTag {
    #[default]
    Auto,
}

/// A numeric parameter or `"auto"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Value(f64),
    Auto(AutoTag),
}

impl Default for Param {
    fn default() -> Self {
        Param::Auto(AutoTag::Auto)
    }
}

impl Param {
    fn or_else(self, auto: impl FnOnce() -> Result<f64>) -> Result<f64> {
        match self {
            Param::Value(v) => Ok(v),
            Param::Auto(_) => auto(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedChoice {
    Auto,
    Greedy,
    Exact,
}

/// `"auto" | "greedy" | "exact"` or an explicit 1-indexed vertex list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DominatingSetChoice {
    Named(NamedChoice),
    Explicit(Vec<usize>),
}

impl Default for DominatingSetChoice {
    fn default() -> Self {
        DominatingSetChoice::Named(NamedChoice::Auto)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySection {
    pub algorithm: PolicyKind,
    #[serde(default)]
    pub c1: Param,
    #[serde(default)]
    pub c2: Param,
    /// Learning-rate scale of the second block of `weak_alt`.
    #[serde(default)]
    pub c1_second: Param,
    #[serde(default)]
    pub dominating_set: DominatingSetChoice,
    #[serde(default)]
    pub domination_definition: DominationTarget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceDetail {
    /// Totals only.
    None,
    /// Per-round scalars.
    #[default]
    Summary,
    /// Per-round scalars plus `q_t` and `p_t`.
    Full,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub horizon: u64,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub trace: TraceDetail,
    /// Check the per-round invariants and record violations.
    #[serde(default)]
    pub check_invariants: bool,
}

/// Cross product of dotted-path overrides, e.g.
/// `{"run.horizon": [1000, 10000], "graph.spec": ["bandit:5", "full_feedback:5"]}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub grid: BTreeMap<String, Vec<Value>>,
}

impl SweepSection {
    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Parses `text` after applying `path=value` overrides to the raw JSON.
    pub fn from_json_with_overrides(text: &str, overrides: &[String]) -> Result<Self> {
        let mut doc: Value = serde_json::from_str(text)?;
        for o in overrides {
            let (path, raw) = o
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override {o:?} is not path=value")))?;
            set_path(&mut doc, path.trim(), parse_override_value(raw.trim()))?;
        }
        Ok(serde_json::from_value(doc)?)
    }

    /// One config per grid cell, labelled `path=value,...`; a config
    /// without a grid yields itself with an empty label.
    pub fn expand_grid(&self) -> Result<Vec<(String, RunConfig)>> {
        let mut base = self.clone();
        base.sweep = SweepSection::default();
        let base_doc = serde_json::to_value(&base)?;
        let mut cells = vec![(Vec::<String>::new(), base_doc)];
        for (path, values) in &self.sweep.grid {
            if values.is_empty() {
                return Err(Error::Config(format!("sweep axis {path} has no values")));
            }
            let mut next = Vec::with_capacity(cells.len() * values.len());
            for (labels, doc) in &cells {
                for v in values {
                    let mut doc = doc.clone();
                    set_path(&mut doc, path, v.clone())?;
                    let mut labels = labels.clone();
                    labels.push(format!("{path}={}", display_value(v)));
                    next.push((labels, doc));
                }
            }
            cells = next;
        }
        cells
            .into_iter()
            .map(|(labels, doc)| Ok((labels.join(","), serde_json::from_value(doc)?)))
            .collect()
    }
}

fn display_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Values that parse as JSON are taken as JSON, anything else as a string.
fn parse_override_value(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

pub fn set_path(doc: &mut Value, path: &str, value: Value) -> Result<()> {
    if path.is_empty() {
        return Err(Error::Config("empty override path".into()));
    }
    let mut node = doc;
    let parts: Vec<&str> = path.split('.').collect();
    for (n, part) in parts.iter().enumerate() {
        let last = n + 1 == parts.len();
        node = match node {
            Value::Object(map) => {
                if last {
                    map.insert(part.to_string(), value);
                    return Ok(());
                }
                map.entry(part.to_string())
                    .or_insert_with(|| Value::Object(Default::default()))
            }
            Value::Array(items) => {
                let idx: usize = part
                    .parse()
                    .map_err(|_| Error::Config(format!("{path}: {part:?} is not an index")))?;
                let len = items.len();
                let slot = items
                    .get_mut(idx)
                    .ok_or_else(|| Error::Config(format!("{path}: index {idx} >= {len}")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(Error::Config(format!("{path}: {part:?} is not a container"))),
        };
    }
    unreachable!("loop returns on the last component")
}

/// Concrete policy parameters after `"auto"` resolution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedPolicy {
    pub algorithm: PolicyKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1_second: Option<f64>,
    /// Fixed rates of the Exp3.G baseline.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    pub alpha: usize,
    pub alpha_exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha2: Option<usize>,
    /// 1-indexed.
    pub dominating_set: Vec<usize>,
    pub v1: Vec<usize>,
    pub v2: Vec<usize>,
    pub domination_definition: DominationTarget,
}

/// A validated config with its graph built and parameters resolved.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub config: RunConfig,
    pub num_arms: usize,
    pub observability: Observability,
    pub policy: ResolvedPolicy,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub graph: FeedbackGraph,
    #[serde(skip)]
    pub analysis: GraphAnalysis,
}

pub fn resolve(config: &RunConfig) -> Result<ResolvedConfig> {
    let graph = graph_catalog(&config.graph.spec)?;
    let k = graph.num_arms();
    let p = &config.policy;
    let dominating = match &p.dominating_set {
        DominatingSetChoice::Named(NamedChoice::Auto) => DominatingChoice::Auto,
        DominatingSetChoice::Named(NamedChoice::Greedy) => DominatingChoice::Greedy,
        DominatingSetChoice::Named(NamedChoice::Exact) => DominatingChoice::Exact,
        DominatingSetChoice::Explicit(d) => {
            if let Some(&bad) = d.iter().find(|&&i| i == 0 || i > k) {
                return Err(Error::InvalidDominatingSet(format!(
                    "vertex {bad} is not in 1..={k}"
                )));
            }
            DominatingChoice::Explicit(d.iter().map(|i| i - 1).collect())
        }
    };
    let analysis = analyze(
        &graph,
        &AnalysisOptions {
            definition: p.domination_definition,
            dominating,
            ..Default::default()
        },
    )?;
    let class = analysis.observability.tag;
    if class != p.algorithm.required_class() {
        return Err(Error::PolicyGraphMismatch {
            policy: p.algorithm.name().to_string(),
            class: class.to_string(),
        });
    }
    config.environment.validate(k)?;
    let horizon = config.run.horizon;
    if horizon == 0 {
        return Err(Error::Config("run.horizon must be positive".into()));
    }
    if config.run.seeds.is_empty() {
        return Err(Error::Config("run.seeds must not be empty".into()));
    }
    let mut warnings = Vec::new();
    if (horizon as f64) < (k as f64).powi(3) {
        let msg = format!("horizon {horizon} is below K^3 = {}", k.pow(3));
        log::warn!("{msg}");
        warnings.push(msg);
    }
    // The recommended parameters need ln T > 0.
    let t = (horizon as f64).max(2.0);
    let alpha = analysis.alpha.best_known();
    let mut resolved = ResolvedPolicy {
        algorithm: p.algorithm,
        c1: None,
        c2: None,
        c1_second: None,
        gamma: None,
        beta: None,
        alpha,
        alpha_exact: analysis.alpha.exact.is_some(),
        alpha2: analysis.alpha2.map(|a| a.best_known()),
        dominating_set: one_indexed(&analysis.dominating_set),
        v1: one_indexed(&analysis.v1),
        v2: one_indexed(&analysis.v2),
        domination_definition: analysis.definition,
    };
    match p.algorithm {
        PolicyKind::Strong => {
            resolved.c1 = Some(p.c1.or_else(|| recommended_c1(alpha, k, t))?);
        }
        PolicyKind::Exp3g => {
            let (gamma, beta) = exp3g_parameters(alpha, horizon)?;
            resolved.gamma = Some(gamma);
            resolved.beta = Some(beta);
        }
        PolicyKind::Weak | PolicyKind::WeakAlt => {
            let rec = recommended_weak_params(analysis.delta_used(), k, t)?;
            resolved.c1 = Some(p.c1.or_else(|| Ok(rec.c1))?);
            resolved.c2 = Some(p.c2.or_else(|| Ok(rec.c2))?);
            if p.algorithm == PolicyKind::WeakAlt {
                let alpha2 = resolved.alpha2.ok_or(Error::EmptyV2)?;
                resolved.c1_second =
                    Some(p.c1_second.or_else(|| recommended_c1(alpha2, k, t))?);
            }
        }
    }
    let out = ResolvedConfig {
        config: config.clone(),
        num_arms: k,
        observability: class,
        policy: resolved,
        warnings,
        graph,
        analysis,
    };
    // Surface parameter errors now rather than at the first run.
    out.build_policy()?;
    Ok(out)
}

impl ResolvedConfig {
    pub fn build_policy(&self) -> Result<Box<dyn Policy>> {
        let r = &self.policy;
        let missing = || Error::Config("unresolved policy parameter".into());
        Ok(match r.algorithm {
            PolicyKind::Strong => {
                Box::new(StrongPolicy::new(&self.graph, r.c1.ok_or_else(missing)?)?)
            }
            PolicyKind::Exp3g => Box::new(Exp3GPolicy::new(
                &self.graph,
                r.alpha,
                self.config.run.horizon,
            )?),
            PolicyKind::Weak => Box::new(WeakPolicy::new(
                &self.graph,
                &self.analysis,
                WeakParams {
                    c1: r.c1.ok_or_else(missing)?,
                    c2: r.c2.ok_or_else(missing)?,
                },
            )?),
            PolicyKind::WeakAlt => Box::new(WeakAltPolicy::new(
                &self.graph,
                &self.analysis,
                WeakAltParams {
                    c1: r.c1.ok_or_else(missing)?,
                    c2: r.c2.ok_or_else(missing)?,
                    c1_second: r.c1_second.ok_or_else(missing)?,
                },
            )?),
        })
    }
}
