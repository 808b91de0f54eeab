use std::fmt;

use serde::{Deserialize, Serialize};

use super::FeedbackGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observability {
    StronglyObservable,
    WeaklyObservable,
    Unobservable,
}

impl fmt::Display for Observability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Observability::StronglyObservable => "strongly observable",
            Observability::WeaklyObservable => "weakly observable",
            Observability::Unobservable => "unobservable",
        })
    }
}

/// Per-vertex observability flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexFlags {
    pub has_self_loop: bool,
    pub observed_by_all_others: bool,
    pub weakly_observable: bool,
    pub unobserved: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservabilityClass {
    pub tag: Observability,
    pub vertices: Vec<VertexFlags>,
}

impl ObservabilityClass {
    /// The weakly observable vertices `W`.
    pub fn weakly_observable_vertices(&self) -> Vec<usize> {
        self.vertices
            .iter()
            .enumerate()
            .filter(|(_, f)| f.weakly_observable)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_observable(&self) -> bool {
        self.tag != Observability::Unobservable
    }
}

pub fn classify_observability(g: &FeedbackGraph) -> ObservabilityClass {
    let k = g.num_arms();
    let vertices: Vec<VertexFlags> = (0..k)
        .map(|i| {
            let has_self_loop = g.has_self_loop(i);
            let others_in = g.in_neighbors(i).iter().filter(|&&j| j != i).count();
            let observed_by_all_others = others_in == k - 1;
            let unobserved = g.in_neighbors(i).is_empty();
            VertexFlags {
                has_self_loop,
                observed_by_all_others,
                weakly_observable: !has_self_loop && !observed_by_all_others && !unobserved,
                unobserved,
            }
        })
        .collect();

    let tag = if vertices.iter().any(|f| f.unobserved) {
        Observability::Unobservable
    } else if vertices
        .iter()
        .all(|f| f.has_self_loop || f.observed_by_all_others)
    {
        Observability::StronglyObservable
    } else {
        Observability::WeaklyObservable
    };
    ObservabilityClass { tag, vertices }
}
