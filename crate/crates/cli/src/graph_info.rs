use std::path::Path;

use graphftrl::graph::{
    classify_observability, independence_number, one_indexed, partition_v1_v2, target_set,
    weakly_dominating_set_exact, weakly_dominating_set_greedy, AlphaBounds, AlphaMode,
    CatalogGraph, DominationTarget, FeedbackGraph, DEFAULT_ALPHA_MAX_K, DEFAULT_DELTA_MAX_K,
};
use graphftrl::harness::{write_atomic, PolicyKind};
use graphftrl::{Error, Observability};
use serde::Serialize;

use crate::{CmdResult, Failure};

#[derive(Debug, Serialize)]
struct Domination {
    definition: DominationTarget,
    /// 1-indexed vertices that must be covered.
    targets: Vec<usize>,
    delta: Option<usize>,
    exact: bool,
    dominating_set: Option<Vec<usize>>,
    v1: Option<Vec<usize>>,
    v2: Option<Vec<usize>>,
    k_prime: Option<usize>,
    alpha2: Option<AlphaBounds>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct Report {
    spec: String,
    num_arms: usize,
    num_edges: usize,
    observability: Observability,
    /// 1-indexed vertices without a self-loop that not every other vertex
    /// observes.
    weakly_observable_vertices: Vec<usize>,
    alpha: AlphaBounds,
    domination: Vec<Domination>,
    #[serde(skip_serializing_if = "Option::is_none")]
    policy: Option<PolicyKind>,
}

fn domination(g: &FeedbackGraph, definition: DominationTarget) -> Domination {
    let k = g.num_arms();
    let targets = one_indexed(&target_set(g, definition));
    let exact = k <= DEFAULT_DELTA_MAX_K;
    let set = if exact {
        weakly_dominating_set_exact(g, definition, DEFAULT_DELTA_MAX_K)
    } else {
        weakly_dominating_set_greedy(g, definition)
    };
    let mut d = Domination {
        definition,
        targets,
        delta: None,
        exact,
        dominating_set: None,
        v1: None,
        v2: None,
        k_prime: None,
        alpha2: None,
        error: None,
    };
    let result = set.and_then(|set| {
        let (v1, v2) = partition_v1_v2(g, &set, definition)?;
        let mode = if v2.len() <= DEFAULT_ALPHA_MAX_K {
            AlphaMode::Exact {
                max_k: DEFAULT_ALPHA_MAX_K,
            }
        } else {
            AlphaMode::GreedyBound
        };
        let alpha2 = (!v2.is_empty())
            .then(|| graphftrl::graph::independence_number_of(g, &v2, mode))
            .transpose()?;
        Ok((set, v1, v2, alpha2))
    });
    match result {
        Ok((set, v1, v2, alpha2)) => {
            d.delta = Some(set.len());
            d.dominating_set = Some(one_indexed(&set));
            d.k_prime = Some(v2.len());
            d.v1 = Some(one_indexed(&v1));
            d.v2 = Some(one_indexed(&v2));
            d.alpha2 = alpha2;
        }
        Err(e) => d.error = Some(e.to_string()),
    }
    d
}

pub fn run(spec: &str, infer_policy: bool, out: Option<&Path>) -> CmdResult {
    let catalog: CatalogGraph = spec.parse()?;
    let g = graphftrl::graph::graph_catalog(&catalog)?;
    let class = classify_observability(&g);
    let mode = if g.num_arms() <= DEFAULT_ALPHA_MAX_K {
        AlphaMode::Exact {
            max_k: DEFAULT_ALPHA_MAX_K,
        }
    } else {
        AlphaMode::GreedyBound
    };
    let report = Report {
        spec: catalog.to_string(),
        num_arms: g.num_arms(),
        num_edges: g.num_edges(),
        observability: class.tag,
        weakly_observable_vertices: one_indexed(&class.weakly_observable_vertices()),
        alpha: independence_number(&g, mode)?,
        domination: vec![
            domination(&g, DominationTarget::NoSelfLoop),
            domination(&g, DominationTarget::WeaklyObservable),
        ],
        policy: match class.tag {
            _ if !infer_policy => None,
            Observability::StronglyObservable => Some(PolicyKind::Strong),
            Observability::WeaklyObservable => Some(PolicyKind::Weak),
            Observability::Unobservable => None,
        },
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(Failure::runtime)?;
    text.push('\n');
    if let Some(path) = out {
        write_atomic(path, text.as_bytes())?;
    }
    print!("{text}");
    if infer_policy && class.tag == Observability::Unobservable {
        return Err(Error::Unobservable.into());
    }
    Ok(())
}
