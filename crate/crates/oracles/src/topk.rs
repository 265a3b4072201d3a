//! Bounded-heap top-k selection.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use cmabt_core::Action;
use serde::{Deserialize, Serialize};

use crate::error::{OracleError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Max,
    Min,
}

/// Heap entry ordered so that a *greater* entry is a *better* pick.
#[derive(Debug, Clone, Copy)]
struct Ranked {
    weight: f64,
    id: usize,
    dir: Direction,
}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        let by_weight = match self.dir {
            Direction::Max => self.weight.total_cmp(&other.weight),
            Direction::Min => other.weight.total_cmp(&self.weight),
        };
        // lower id wins ties
        by_weight.then_with(|| other.id.cmp(&self.id))
    }
}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ranked {}

/// Indices of the `k` extremal weights, best first. Ties go to the lowest
/// index; `-inf`/`+inf` sentinels order like any other value. O(m log k).
pub fn top_k_indices(weights: &[f64], k: usize, dir: Direction) -> Result<Vec<usize>> {
    let m = weights.len();
    if k > m {
        return Err(OracleError::KTooLarge { k, m });
    }
    if let Some(i) = weights.iter().position(|w| w.is_nan()) {
        return Err(OracleError::NanWeight(i));
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    // min-heap of the current best k: the root is the weakest kept entry
    let mut heap: BinaryHeap<Reverse<Ranked>> = BinaryHeap::with_capacity(k + 1);
    for (id, &weight) in weights.iter().enumerate() {
        let r = Ranked { weight, id, dir };
        if heap.len() < k {
            heap.push(Reverse(r));
        } else if let Some(Reverse(worst)) = heap.peek() {
            if r > *worst {
                heap.pop();
                heap.push(Reverse(r));
            }
        }
    }
    let mut kept: Vec<Ranked> = heap.into_iter().map(|Reverse(r)| r).collect();
    kept.sort_unstable_by(|a, b| b.cmp(a));
    Ok(kept.into_iter().map(|r| r.id).collect())
}

/// The `k` extremal arms as a set action.
pub fn top_k(weights: &[f64], k: usize, dir: Direction) -> Result<Action> {
    Ok(Action::set(top_k_indices(weights, k, dir)?)?)
}

/// The `k` extremal arms as a ranked list, best first.
pub fn top_k_list(weights: &[f64], k: usize, dir: Direction) -> Result<Action> {
    Ok(Action::list(top_k_indices(weights, k, dir)?)?)
}
