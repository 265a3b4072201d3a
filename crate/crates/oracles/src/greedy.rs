//! Greedy hill-climbing for influence maximisation.
//!
//! Each round adds the node whose inclusion gives the largest estimated
//! spread. Marginal gains are re-evaluated for every candidate in every round
//! (no lazy evaluation). With an exact spread evaluator the result is within
//! `1 - 1/e` of the optimum by submodularity; with Monte Carlo evaluation the
//! sampling error comes on top.

use cmabt_core::Action;

use crate::error::{OracleError, Result};
use crate::graph::WeightedGraph;
use crate::spread::{influence_spread_mc, stage_seed};

/// Approximation ratio of greedy submodular maximisation.
pub const GREEDY_RATIO: f64 = 1.0 - 1.0 / std::f64::consts::E;

pub const DEFAULT_MC_PER_EVAL: usize = 1000;

/// Greedy selection of `k` nodes out of `nodes` under an arbitrary spread
/// evaluator. Ties go to the lowest node id. Returns the set and its
/// evaluated spread.
pub fn greedy_im_with<F>(nodes: usize, k: usize, mut spread: F) -> Result<(Action, f64)>
where
    F: FnMut(usize, &[usize]) -> Result<f64>,
{
    if k > nodes {
        return Err(OracleError::KTooLarge { k, m: nodes });
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut in_set = vec![false; nodes];
    let mut value = 0.0;
    for round in 0..k {
        let mut best: Option<(usize, f64)> = None;
        let mut trial = chosen.clone();
        trial.push(0);
        for c in (0..nodes).filter(|&c| !in_set[c]) {
            *trial.last_mut().expect("non-empty") = c;
            let s = spread(round, &trial)?;
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((c, s));
            }
        }
        let (c, s) = best.expect("k <= nodes leaves a candidate");
        chosen.push(c);
        in_set[c] = true;
        value = s;
    }
    Ok((Action::set(chosen)?, value))
}

/// Greedy IM with `mc_per_eval` Monte Carlo diffusions per candidate.
/// All candidates of one round share a random stream derived from `seed`,
/// so the whole run is deterministic given `seed`.
pub fn greedy_im(graph: &WeightedGraph, k: usize, mc_per_eval: usize, seed: u64) -> Result<Action> {
    greedy_im_with(graph.node_count(), k, |round, s| {
        Ok(influence_spread_mc(graph, s, mc_per_eval, stage_seed(seed, round)))
    })
    .map(|(a, _)| a)
}
