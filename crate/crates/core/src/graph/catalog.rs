//! Named graph families and the `name:arg:...` spec strings that address them.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{FeedbackGraph, GraphFile};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum CatalogGraph {
    /// Self-loops only: the `K`-armed bandit.
    Bandit(usize),
    /// `V x V`: prediction with expert advice.
    FullFeedback(usize),
    /// `V x V` minus the self-loops.
    LooplessClique(usize),
    /// Vertex 1 reveals every loss (its own included); the other vertices
    /// reveal nothing.
    RevealingAction(usize),
    /// `{(i, j) | i >= j}`.
    TotalOrder(usize),
    /// Each off-diagonal ordered pair independently with probability `p`;
    /// self-loops always present.
    Random { k: usize, p: f64, seed: u64 },
    /// Vertex 1 reveals itself and the `blind` loopless arms `2..=blind+1`;
    /// the remaining arms are ordinary bandit arms.
    MixedRevealing { k: usize, blind: usize },
    /// A JSON graph file.
    File(PathBuf),
}

pub fn graph_catalog(spec: &CatalogGraph) -> Result<FeedbackGraph> {
    let check_k = |k: usize| {
        if k < 2 {
            Err(Error::BadParameter(format!("K must be at least 2, got {k}")))
        } else {
            Ok(k)
        }
    };
    match *spec {
        CatalogGraph::Bandit(k) => FeedbackGraph::new(check_k(k)?, (0..k).map(|i| (i, i))),
        CatalogGraph::FullFeedback(k) => {
            FeedbackGraph::new(check_k(k)?, (0..k).flat_map(|i| (0..k).map(move |j| (i, j))))
        }
        CatalogGraph::LooplessClique(k) => FeedbackGraph::new(
            check_k(k)?,
            (0..k).flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j))),
        ),
        CatalogGraph::RevealingAction(k) => FeedbackGraph::new(check_k(k)?, (0..k).map(|j| (0, j))),
        CatalogGraph::TotalOrder(k) => {
            FeedbackGraph::new(check_k(k)?, (0..k).flat_map(|i| (0..=i).map(move |j| (i, j))))
        }
        CatalogGraph::Random { k, p, seed } => {
            check_k(k)?;
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::BadParameter(format!("edge probability {p} not in [0, 1]")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut edges = Vec::new();
            for i in 0..k {
                for j in 0..k {
                    if i == j || rng.gen::<f64>() < p {
                        edges.push((i, j));
                    }
                }
            }
            FeedbackGraph::new(k, edges)
        }
        CatalogGraph::MixedRevealing { k, blind } => {
            check_k(k)?;
            if blind == 0 || blind >= k {
                return Err(Error::BadParameter(format!(
                    "blind arm count must be in 1..={}, got {blind}",
                    k - 1
                )));
            }
            let reveal = (0..=blind).map(|j| (0, j));
            let loops = (blind + 1..k).map(|j| (j, j));
            FeedbackGraph::new(k, reveal.chain(loops))
        }
        CatalogGraph::File(ref path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::GraphParse(format!("{}: {e}", path.display())))?;
            let file: GraphFile = serde_json::from_str(&text)
                .map_err(|e| Error::GraphParse(format!("{}: {e}", path.display())))?;
            FeedbackGraph::try_from(file)
        }
    }
}

/// Parses a spec string such as `revealing_action:5` or `random:10:0.3:42`
/// and builds the graph.
pub fn parse_graph_spec(spec: &str) -> Result<FeedbackGraph> {
    graph_catalog(&spec.parse()?)
}

impl FromStr for CatalogGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::GraphParse(format!("`{s}`: {msg}"));
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(CatalogGraph::File(PathBuf::from(path)));
        }
        if s.ends_with(".json") {
            return Ok(CatalogGraph::File(PathBuf::from(s)));
        }
        let parts: Vec<&str> = s.split(':').collect();
        let int = |i: usize| -> Result<usize> {
            parts
                .get(i)
                .filter(|p| !p.is_empty())
                .ok_or_else(|| bad("missing argument"))?
                .parse::<usize>()
                .map_err(|_| bad("expected a non-negative integer"))
        };
        let arity = |n: usize| {
            if parts.len() == n {
                Ok(())
            } else {
                Err(bad(&format!("expected {} argument(s)", n - 1)))
            }
        };
        let spec = match parts[0] {
            "bandit" => {
                arity(2)?;
                CatalogGraph::Bandit(int(1)?)
            }
            "full_feedback" => {
                arity(2)?;
                CatalogGraph::FullFeedback(int(1)?)
            }
            "loopless_clique" => {
                arity(2)?;
                CatalogGraph::LooplessClique(int(1)?)
            }
            "revealing_action" => {
                arity(2)?;
                CatalogGraph::RevealingAction(int(1)?)
            }
            "total_order" => {
                arity(2)?;
                CatalogGraph::TotalOrder(int(1)?)
            }
            "mixed_revealing" => {
                arity(3)?;
                CatalogGraph::MixedRevealing {
                    k: int(1)?,
                    blind: int(2)?,
                }
            }
            "random" => {
                arity(4)?;
                let p = parts[2]
                    .parse::<f64>()
                    .map_err(|_| bad("expected a probability"))?;
                let seed = parts[3]
                    .parse::<u64>()
                    .map_err(|_| bad("expected an integer seed"))?;
                CatalogGraph::Random { k: int(1)?, p, seed }
            }
            _ => return Err(bad("unknown graph family")),
        };
        Ok(spec)
    }
}

impl fmt::Display for CatalogGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogGraph::Bandit(k) => write!(f, "bandit:{k}"),
            CatalogGraph::FullFeedback(k) => write!(f, "full_feedback:{k}"),
            CatalogGraph::LooplessClique(k) => write!(f, "loopless_clique:{k}"),
            CatalogGraph::RevealingAction(k) => write!(f, "revealing_action:{k}"),
            CatalogGraph::TotalOrder(k) => write!(f, "total_order:{k}"),
            CatalogGraph::Random { k, p, seed } => write!(f, "random:{k}:{p}:{seed}"),
            CatalogGraph::MixedRevealing { k, blind } => write!(f, "mixed_revealing:{k}:{blind}"),
            CatalogGraph::File(path) => write!(f, "file:{}", path.display()),
        }
    }
}

impl Serialize for CatalogGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CatalogGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
