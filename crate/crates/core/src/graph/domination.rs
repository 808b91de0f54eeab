//! Weakly dominating sets.
//!
//! Two target sets are supported. Under [`DominationTarget::NoSelfLoop`] the
//! set must cover every vertex without a self-loop; under
//! [`DominationTarget::WeaklyObservable`] it must cover the weakly
//! observable vertices `W` only (the older definition from the feedback-graph
//! literature).

use serde::{Deserialize, Serialize};

use super::{classify_observability, FeedbackGraph};
use crate::error::{Error, Result};

pub const DEFAULT_DELTA_MAX_K: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DominationTarget {
    #[default]
    NoSelfLoop,
    WeaklyObservable,
}

/// The vertices a weakly dominating set must cover, ascending.
pub fn target_set(g: &FeedbackGraph, definition: DominationTarget) -> Vec<usize> {
    match definition {
        DominationTarget::NoSelfLoop => (0..g.num_arms()).filter(|&i| !g.has_self_loop(i)).collect(),
        DominationTarget::WeaklyObservable => {
            classify_observability(g).weakly_observable_vertices()
        }
    }
}

fn check_coverable(g: &FeedbackGraph, targets: &[usize]) -> Result<()> {
    match targets.iter().find(|&&i| g.in_neighbors(i).is_empty()) {
        Some(&i) => Err(Error::UncoverableTarget(i + 1)),
        None => Ok(()),
    }
}

pub fn covers_targets(g: &FeedbackGraph, d: &[usize], definition: DominationTarget) -> bool {
    let mut covered = vec![false; g.num_arms()];
    for &i in d {
        for &j in g.out_neighbors(i) {
            covered[j] = true;
        }
    }
    target_set(g, definition).iter().all(|&t| covered[t])
}

/// Greedy set cover over out-neighborhoods; ties go to the lowest index.
/// The result is sorted ascending.
pub fn weakly_dominating_set_greedy(
    g: &FeedbackGraph,
    definition: DominationTarget,
) -> Result<Vec<usize>> {
    let targets = target_set(g, definition);
    check_coverable(g, &targets)?;
    let mut uncovered = vec![false; g.num_arms()];
    for &t in &targets {
        uncovered[t] = true;
    }
    let mut remaining = targets.len();
    let mut chosen = Vec::new();
    while remaining > 0 {
        let (best, gain) = (0..g.num_arms())
            .map(|v| {
                let gain = g.out_neighbors(v).iter().filter(|&&j| uncovered[j]).count();
                (v, gain)
            })
            .fold((0, 0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        debug_assert!(gain > 0, "coverable targets always admit a positive gain");
        for &j in g.out_neighbors(best) {
            if uncovered[j] {
                uncovered[j] = false;
                remaining -= 1;
            }
        }
        chosen.push(best);
    }
    chosen.sort_unstable();
    Ok(chosen)
}

/// Minimum-cardinality weakly dominating set by enumeration in increasing
/// size; among the minimum sets, the lexicographically smallest is returned.
pub fn weakly_dominating_set_exact(
    g: &FeedbackGraph,
    definition: DominationTarget,
    max_k: usize,
) -> Result<Vec<usize>> {
    let k = g.num_arms();
    if k > max_k || k > 64 {
        return Err(Error::TooLarge { k, max_k: max_k.min(64) });
    }
    let targets = target_set(g, definition);
    check_coverable(g, &targets)?;
    let target_mask = targets.iter().fold(0u64, |m, &t| m | (1u64 << t));
    if target_mask == 0 {
        return Ok(Vec::new());
    }
    let out: Vec<u64> = (0..k).map(|i| g.out_mask(i)).collect();
    let upper = weakly_dominating_set_greedy(g, definition)?.len();

    let mut combo = Vec::with_capacity(upper);
    for size in 1..=upper {
        combo.clear();
        combo.extend(0..size);
        loop {
            let cover = combo.iter().fold(0u64, |m, &v| m | out[v]);
            if cover & target_mask == target_mask {
                return Ok(combo.clone());
            }
            if !next_combination(&mut combo, k) {
                break;
            }
        }
    }
    unreachable!("the greedy cover bounds the minimum size")
}

/// Advances `combo` to the next `combo.len()`-subset of `0..n` in
/// lexicographic order. Returns false once exhausted.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let r = combo.len();
    let mut i = r;
    while i > 0 {
        i -= 1;
        if combo[i] < n - r + i {
            combo[i] += 1;
            for j in i + 1..r {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
