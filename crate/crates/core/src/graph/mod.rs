//! Directed feedback graphs and the structural quantities derived from them.
//!
//! Choosing arm `i` reveals the loss of every out-neighbor of `i`. Vertices
//! are 0-indexed inside the library; every serialized form (graph files,
//! reports, CLI output) is 1-indexed.

mod analysis;
mod catalog;
mod domination;
mod independence;
mod observability;

pub use analysis::{analyze, partition_v1_v2, AnalysisOptions, DominatingChoice, GraphAnalysis};
pub use catalog::{graph_catalog, parse_graph_spec, CatalogGraph};
pub use domination::{
    covers_targets, target_set, weakly_dominating_set_exact, weakly_dominating_set_greedy,
    DominationTarget, DEFAULT_DELTA_MAX_K,
};
pub use independence::{
    independence_number, independence_number_of, AlphaBounds, AlphaMode, DEFAULT_ALPHA_MAX_K,
};
pub use observability::{classify_observability, Observability, ObservabilityClass, VertexFlags};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Directed graph over `k` arms with precomputed neighborhoods.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeedbackGraph {
    k: usize,
    adjacency: Vec<bool>,
    out_neighbors: Vec<Vec<usize>>,
    in_neighbors: Vec<Vec<usize>>,
}

impl FeedbackGraph {
    /// Builds a graph from 0-indexed edges. Duplicate edges are ignored.
    pub fn new<I>(k: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if k < 2 {
            return Err(Error::BadParameter(format!(
                "a feedback graph needs at least 2 vertices, got {k}"
            )));
        }
        let mut adjacency = vec![false; k * k];
        for (i, j) in edges {
            if i >= k || j >= k {
                return Err(Error::GraphParse(format!(
                    "edge ({}, {}) outside vertex range 1..={k}",
                    i + 1,
                    j + 1
                )));
            }
            adjacency[i * k + j] = true;
        }
        let mut out_neighbors = vec![Vec::new(); k];
        let mut in_neighbors = vec![Vec::new(); k];
        for i in 0..k {
            for j in 0..k {
                if adjacency[i * k + j] {
                    out_neighbors[i].push(j);
                    in_neighbors[j].push(i);
                }
            }
        }
        Ok(Self {
            k,
            adjacency,
            out_neighbors,
            in_neighbors,
        })
    }

    /// Builds a graph from 1-indexed edges, as used in files and on the CLI.
    pub fn from_one_indexed<I>(k: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let edges = edges
            .into_iter()
            .map(|(i, j)| {
                if i == 0 || j == 0 {
                    Err(Error::GraphParse(format!(
                        "edge ({i}, {j}) uses vertex 0; vertices are 1-indexed"
                    )))
                } else {
                    Ok((i - 1, j - 1))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(k, edges)
    }

    pub fn num_arms(&self) -> usize {
        self.k
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.adjacency[from * self.k + to]
    }

    pub fn has_self_loop(&self, i: usize) -> bool {
        self.has_edge(i, i)
    }

    /// `N_out(i)`: the vertices whose losses are revealed by playing `i`.
    pub fn out_neighbors(&self, i: usize) -> &[usize] {
        &self.out_neighbors[i]
    }

    /// `N_in(i)`: the vertices whose play reveals the loss of `i`.
    pub fn in_neighbors(&self, i: usize) -> &[usize] {
        &self.in_neighbors[i]
    }

    /// All edges, 0-indexed, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.k).flat_map(move |i| self.out_neighbors[i].iter().map(move |&j| (i, j)))
    }

    pub fn num_edges(&self) -> usize {
        self.out_neighbors.iter().map(Vec::len).sum()
    }

    /// Out-neighborhood of `i` as a bit mask. Only valid for `k <= 64`.
    pub(crate) fn out_mask(&self, i: usize) -> u64 {
        debug_assert!(self.k <= 64);
        self.out_neighbors[i]
            .iter()
            .fold(0u64, |m, &j| m | (1u64 << j))
    }

    /// Relabels vertex `i` as `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.k {
            return Err(Error::BadParameter("permutation length mismatch".into()));
        }
        let mut seen = vec![false; self.k];
        for &p in perm {
            if p >= self.k || std::mem::replace(&mut seen[p], true) {
                return Err(Error::BadParameter("not a permutation".into()));
            }
        }
        Self::new(self.k, self.edges().map(|(i, j)| (perm[i], perm[j])))
    }

    /// Subgraph induced by `vertices`; vertex `vertices[r]` becomes `r`.
    pub fn induced(&self, vertices: &[usize]) -> Result<Self> {
        let edges = vertices.iter().enumerate().flat_map(|(a, &u)| {
            vertices
                .iter()
                .enumerate()
                .filter(move |&(_, &v)| self.has_edge(u, v))
                .map(move |(b, _)| (a, b))
        });
        Self::new(vertices.len(), edges.collect::<Vec<_>>())
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            k: self.k,
            edges: self.edges().map(|(i, j)| [i + 1, j + 1]).collect(),
        }
    }
}

/// JSON graph file: `{"k": 3, "edges": [[1, 1], [1, 2]]}` with 1-indexed
/// vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub k: usize,
    pub edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphFile> for FeedbackGraph {
    type Error = Error;

    fn try_from(file: GraphFile) -> Result<Self> {
        FeedbackGraph::from_one_indexed(file.k, file.edges.into_iter().map(|[i, j]| (i, j)))
    }
}

/// Converts 0-indexed vertices to the 1-indexed external form.
pub fn one_indexed(vertices: &[usize]) -> Vec<usize> {
    vertices.iter().map(|v| v + 1).collect()
}
