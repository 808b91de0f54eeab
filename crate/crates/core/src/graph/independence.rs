//! Independence numbers of directed graphs.
//!
//! Two distinct vertices conflict when an edge joins them in either
//! direction; self-loops never exclude a vertex.

use serde::{Deserialize, Serialize};

use super::FeedbackGraph;
use crate::error::{Error, Result};

pub const DEFAULT_ALPHA_MAX_K: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaMode {
    Exact { max_k: usize },
    GreedyBound,
}

impl Default for AlphaMode {
    fn default() -> Self {
        AlphaMode::Exact {
            max_k: DEFAULT_ALPHA_MAX_K,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaBounds {
    pub lower: usize,
    pub upper: usize,
    pub exact: Option<usize>,
}

impl AlphaBounds {
    /// Exact value if known, otherwise the lower bound.
    pub fn best_known(&self) -> usize {
        self.exact.unwrap_or(self.lower)
    }
}

pub fn independence_number(g: &FeedbackGraph, mode: AlphaMode) -> Result<AlphaBounds> {
    let all: Vec<usize> = (0..g.num_arms()).collect();
    independence_number_of(g, &all, mode)
}

/// Independence number of the subgraph induced by `vertices`.
pub fn independence_number_of(
    g: &FeedbackGraph,
    vertices: &[usize],
    mode: AlphaMode,
) -> Result<AlphaBounds> {
    let n = vertices.len();
    if n == 0 {
        return Ok(AlphaBounds {
            lower: 0,
            upper: 0,
            exact: Some(0),
        });
    }
    let conflicts = |a: usize, b: usize| {
        a != b && (g.has_edge(vertices[a], vertices[b]) || g.has_edge(vertices[b], vertices[a]))
    };
    match mode {
        AlphaMode::Exact { max_k } => {
            if n > max_k || n > 64 {
                return Err(Error::TooLarge {
                    k: n,
                    max_k: max_k.min(64),
                });
            }
            let masks: Vec<u64> = (0..n)
                .map(|a| {
                    (0..n)
                        .filter(|&b| conflicts(a, b))
                        .fold(0u64, |m, b| m | (1u64 << b))
                })
                .collect();
            let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            let mut best = greedy_size(n, &conflicts);
            branch_and_bound(full, 0, &masks, &mut best);
            Ok(AlphaBounds {
                lower: best,
                upper: best,
                exact: Some(best),
            })
        }
        AlphaMode::GreedyBound => Ok(AlphaBounds {
            lower: greedy_size(n, &conflicts),
            upper: n,
            exact: None,
        }),
    }
}

/// Min-degree greedy on the undirected conflict graph, lowest index on ties.
fn greedy_size(n: usize, conflicts: &impl Fn(usize, usize) -> bool) -> usize {
    let mut alive = vec![true; n];
    let mut size = 0;
    loop {
        let pick = (0..n)
            .filter(|&v| alive[v])
            .map(|v| {
                let deg = (0..n).filter(|&u| alive[u] && conflicts(v, u)).count();
                (deg, v)
            })
            .min();
        let Some((_, v)) = pick else { break };
        size += 1;
        alive[v] = false;
        for u in 0..n {
            if conflicts(v, u) {
                alive[u] = false;
            }
        }
    }
    size
}

fn branch_and_bound(candidates: u64, size: usize, conflicts: &[u64], best: &mut usize) {
    if candidates == 0 {
        *best = (*best).max(size);
        return;
    }
    if size + candidates.count_ones() as usize <= *best {
        return;
    }
    let v = candidates.trailing_zeros() as usize;
    let bit = 1u64 << v;
    branch_and_bound(candidates & !bit & !conflicts[v], size + 1, conflicts, best);
    // Excluding an isolated vertex can never help.
    if conflicts[v] & candidates != 0 {
        branch_and_bound(candidates & !bit, size, conflicts, best);
    }
}
