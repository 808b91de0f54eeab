use serde::{Deserialize, Serialize};

use super::{
    classify_observability, independence_number, independence_number_of,
    weakly_dominating_set_exact, weakly_dominating_set_greedy, AlphaBounds, AlphaMode,
    DominationTarget, FeedbackGraph, ObservabilityClass, DEFAULT_ALPHA_MAX_K,
    DEFAULT_DELTA_MAX_K,
};
use crate::error::{Error, Result};

/// How the weakly dominating set `D` is chosen.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum DominatingChoice {
    /// Exact minimum when `K <= delta_max_k`, greedy otherwise.
    #[default]
    Auto,
    Greedy,
    Exact,
    /// Caller-provided set, 0-indexed.
    Explicit(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisOptions {
    pub definition: DominationTarget,
    pub dominating: DominatingChoice,
    pub delta_max_k: usize,
    pub alpha_max_k: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            definition: DominationTarget::NoSelfLoop,
            dominating: DominatingChoice::Auto,
            delta_max_k: DEFAULT_DELTA_MAX_K,
            alpha_max_k: DEFAULT_ALPHA_MAX_K,
        }
    }
}

/// Structure derived from an observable feedback graph. All vertex sets are
/// 0-indexed and sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphAnalysis {
    pub observability: ObservabilityClass,
    pub definition: DominationTarget,
    pub dominating_set: Vec<usize>,
    pub v1: Vec<usize>,
    pub v2: Vec<usize>,
    pub alpha: AlphaBounds,
    /// Independence number of the subgraph induced by `v2`.
    pub alpha2: Option<AlphaBounds>,
}

impl GraphAnalysis {
    pub fn delta_used(&self) -> usize {
        self.dominating_set.len()
    }

    pub fn k_prime(&self) -> usize {
        self.v2.len()
    }

    pub fn num_arms(&self) -> usize {
        self.observability.vertices.len()
    }

    /// Membership mask for `v1`.
    pub fn v1_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.num_arms()];
        for &i in &self.v1 {
            mask[i] = true;
        }
        mask
    }
}

/// Splits `V` into the out-neighborhood union of `d` and its complement.
///
/// Under [`DominationTarget::NoSelfLoop`] every vertex of `V2` must carry a
/// self-loop, otherwise `d` was not a weakly dominating set.
pub fn partition_v1_v2(
    g: &FeedbackGraph,
    d: &[usize],
    definition: DominationTarget,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let k = g.num_arms();
    let mut in_v1 = vec![false; k];
    for &i in d {
        if i >= k {
            return Err(Error::InvalidDominatingSet(format!("vertex {} not in graph", i + 1)));
        }
        for &j in g.out_neighbors(i) {
            in_v1[j] = true;
        }
    }
    let (v1, v2): (Vec<usize>, Vec<usize>) = (0..k).partition(|&i| in_v1[i]);
    if definition == DominationTarget::NoSelfLoop {
        if let Some(&i) = v2.iter().find(|&&i| !g.has_self_loop(i)) {
            return Err(Error::InvalidDominatingSet(format!(
                "vertex {} has no self-loop and is not dominated",
                i + 1
            )));
        }
    }
    Ok((v1, v2))
}

pub fn analyze(g: &FeedbackGraph, opts: &AnalysisOptions) -> Result<GraphAnalysis> {
    let observability = classify_observability(g);
    if !observability.is_observable() {
        return Err(Error::Unobservable);
    }
    let k = g.num_arms();
    let dominating_set = match &opts.dominating {
        DominatingChoice::Auto if k <= opts.delta_max_k => {
            weakly_dominating_set_exact(g, opts.definition, opts.delta_max_k)?
        }
        DominatingChoice::Auto | DominatingChoice::Greedy => {
            weakly_dominating_set_greedy(g, opts.definition)?
        }
        DominatingChoice::Exact => {
            weakly_dominating_set_exact(g, opts.definition, opts.delta_max_k)?
        }
        DominatingChoice::Explicit(d) => {
            let mut d = d.clone();
            d.sort_unstable();
            d.dedup();
            if !super::covers_targets(g, &d, opts.definition) {
                return Err(Error::InvalidDominatingSet(
                    "explicit set does not cover its targets".into(),
                ));
            }
            d
        }
    };
    let (v1, v2) = partition_v1_v2(g, &dominating_set, opts.definition)?;
    let alpha_mode = |n: usize| {
        if n <= opts.alpha_max_k {
            AlphaMode::Exact {
                max_k: opts.alpha_max_k,
            }
        } else {
            AlphaMode::GreedyBound
        }
    };
    let alpha = independence_number(g, alpha_mode(k))?;
    let alpha2 = if v2.is_empty() {
        None
    } else {
        Some(independence_number_of(g, &v2, alpha_mode(v2.len()))?)
    };
    Ok(GraphAnalysis {
        observability,
        definition: opts.definition,
        dominating_set,
        v1,
        v2,
        alpha,
        alpha2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse_graph_spec, Observability};

    #[test]
    fn partition_example() {
        let g = FeedbackGraph::from_one_indexed(4, [(1, 1), (1, 2), (1, 3), (4, 4)]).unwrap();
        let (v1, v2) = partition_v1_v2(&g, &[0], DominationTarget::NoSelfLoop).unwrap();
        assert_eq!(v1, vec![0, 1, 2]);
        assert_eq!(v2, vec![3]);
    }

    #[test]
    fn partition_rejects_invalid_set() {
        let g = FeedbackGraph::from_one_indexed(3, [(1, 1), (1, 2), (2, 3)]).unwrap();
        // {2} covers 3 but leaves the loopless vertex 2 in V2.
        assert!(matches!(
            partition_v1_v2(&g, &[1], DominationTarget::NoSelfLoop),
            Err(Error::InvalidDominatingSet(_))
        ));
    }

    #[test]
    fn full_feedback_with_everything_dominating() {
        let g = parse_graph_spec("full_feedback:4").unwrap();
        let d: Vec<usize> = (0..4).collect();
        let (v1, v2) = partition_v1_v2(&g, &d, DominationTarget::NoSelfLoop).unwrap();
        assert_eq!(v1, d);
        assert!(v2.is_empty());
    }

    #[test]
    fn mixed_revealing_analysis() {
        let g = parse_graph_spec("mixed_revealing:6:2").unwrap();
        let a = analyze(&g, &AnalysisOptions::default()).unwrap();
        assert_eq!(a.observability.tag, Observability::WeaklyObservable);
        assert_eq!(a.dominating_set, vec![0]);
        assert_eq!(a.v1, vec![0, 1, 2]);
        assert_eq!(a.v2, vec![3, 4, 5]);
        assert_eq!(a.k_prime(), 3);
        assert_eq!(a.alpha2.unwrap().exact, Some(3));
    }

    #[test]
    fn unobservable_graph_is_rejected() {
        let g = FeedbackGraph::from_one_indexed(3, [(1, 1), (1, 2)]).unwrap();
        assert_eq!(analyze(&g, &AnalysisOptions::default()), Err(Error::Unobservable));
    }

    #[test]
    fn explicit_set_must_cover() {
        let g = parse_graph_spec("revealing_action:4").unwrap();
        let opts = AnalysisOptions {
            dominating: DominatingChoice::Explicit(vec![2]),
            ..Default::default()
        };
        assert!(matches!(analyze(&g, &opts), Err(Error::InvalidDominatingSet(_))));
    }
}
