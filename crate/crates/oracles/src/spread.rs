//! Independent-cascade diffusion: simulation, Monte Carlo spread and exact
//! spread by live-edge enumeration.

use cmabt_core::{derive_seed, rng_from_seed, Action};
use rand::{Rng, RngCore};

use crate::error::{OracleError, Result};
use crate::graph::WeightedGraph;

/// Largest number of uncertain edges the exact evaluator will enumerate.
pub const EXACT_EDGE_LIMIT: usize = 20;

/// Runs one IC diffusion and returns the cumulative active sets
/// `S_0, S_1, ..., S_{V-1}`, each sorted, padded with repeats once stable.
pub fn diffuse(graph: &WeightedGraph, seeds: &[usize], rng: &mut dyn RngCore) -> Vec<Vec<usize>> {
    let v = graph.node_count();
    let mut active = vec![false; v];
    let mut frontier: Vec<usize> = Vec::new();
    for &s in seeds {
        if !active[s] {
            active[s] = true;
            frontier.push(s);
        }
    }
    let snapshot = |active: &[bool]| -> Vec<usize> { (0..v).filter(|&i| active[i]).collect() };
    let mut steps = Vec::with_capacity(v.max(1));
    steps.push(snapshot(&active));
    for _ in 1..v {
        let mut next = Vec::new();
        // attempts in frontier order, then edge order
        for &u in &frontier {
            for &ei in graph.out_edges(u) {
                let e = graph.edge(ei);
                if !active[e.to] && rng.gen::<f64>() < e.p {
                    active[e.to] = true;
                    next.push(e.to);
                }
            }
        }
        frontier = next;
        steps.push(snapshot(&active));
    }
    steps
}

/// Final number of active nodes after one diffusion.
pub fn diffuse_count(graph: &WeightedGraph, seeds: &[usize], rng: &mut dyn RngCore, active: &mut Vec<bool>) -> usize {
    active.clear();
    active.resize(graph.node_count(), false);
    let mut stack: Vec<usize> = Vec::with_capacity(graph.node_count());
    let mut count = 0;
    for &s in seeds {
        if !active[s] {
            active[s] = true;
            stack.push(s);
            count += 1;
        }
    }
    while let Some(u) = stack.pop() {
        for &ei in graph.out_edges(u) {
            let e = graph.edge(ei);
            if !active[e.to] && rng.gen::<f64>() < e.p {
                active[e.to] = true;
                stack.push(e.to);
                count += 1;
            }
        }
    }
    count
}

/// Monte Carlo estimate of `sigma(S)` from `mc` diffusions.
pub fn influence_spread_mc(graph: &WeightedGraph, seeds: &[usize], mc: usize, seed: u64) -> f64 {
    if seeds.is_empty() || mc == 0 {
        return 0.0;
    }
    let mut rng = rng_from_seed(seed);
    let mut buf = Vec::new();
    let total: usize = (0..mc)
        .map(|_| diffuse_count(graph, seeds, &mut rng, &mut buf))
        .sum();
    total as f64 / mc as f64
}

/// Monte Carlo spread of a seed-set action.
pub fn influence_spread(graph: &WeightedGraph, seeds: &Action, mc: usize, seed: u64) -> f64 {
    influence_spread_mc(graph, &seeds.indices(), mc, seed)
}

/// Exact `sigma(S)` by enumerating live-edge worlds over the uncertain edges
/// reachable from `S`. Edges with weight 0 or 1 do not branch.
pub fn influence_spread_exact(graph: &WeightedGraph, seeds: &[usize]) -> Result<f64> {
    if seeds.is_empty() {
        return Ok(0.0);
    }
    let reach = graph.reachable_from(seeds);
    let uncertain: Vec<usize> = (0..graph.edge_count())
        .filter(|&i| {
            let e = graph.edge(i);
            reach[e.from] && e.p > 0.0 && e.p < 1.0
        })
        .collect();
    if uncertain.len() > EXACT_EDGE_LIMIT {
        return Err(OracleError::TooManyEdges {
            edges: uncertain.len(),
            limit: EXACT_EDGE_LIMIT,
        });
    }
    let mut slot = vec![usize::MAX; graph.edge_count()];
    for (j, &ei) in uncertain.iter().enumerate() {
        slot[ei] = j;
    }
    let v = graph.node_count();
    let mut active = vec![false; v];
    let mut stack = Vec::with_capacity(v);
    let mut total = 0.0;
    for mask in 0u64..(1u64 << uncertain.len()) {
        let mut prob = 1.0;
        for (j, &ei) in uncertain.iter().enumerate() {
            let p = graph.edge(ei).p;
            prob *= if mask >> j & 1 == 1 { p } else { 1.0 - p };
        }
        active.iter_mut().for_each(|a| *a = false);
        let mut count = 0usize;
        for &s in seeds {
            if !active[s] {
                active[s] = true;
                stack.push(s);
                count += 1;
            }
        }
        while let Some(u) = stack.pop() {
            for &ei in graph.out_edges(u) {
                let e = graph.edge(ei);
                let live = match slot[ei] {
                    usize::MAX => e.p >= 1.0,
                    j => mask >> j & 1 == 1,
                };
                if live && !active[e.to] {
                    active[e.to] = true;
                    stack.push(e.to);
                    count += 1;
                }
            }
        }
        total += prob * count as f64;
    }
    Ok(total)
}

/// Spread evaluator: exact when enumerable, otherwise Monte Carlo with the
/// given budget and a seed fixed per evaluator so that paired evaluations
/// share their noise.
#[derive(Debug, Clone, Copy)]
pub enum SpreadEval {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
    /// Exact when the uncertain reachable edges fit the enumeration limit.
    Auto { samples: usize, seed: u64 },
}

impl SpreadEval {
    pub fn eval(&self, graph: &WeightedGraph, seeds: &[usize]) -> Result<f64> {
        match *self {
            SpreadEval::Exact => influence_spread_exact(graph, seeds),
            SpreadEval::MonteCarlo { samples, seed } => Ok(influence_spread_mc(graph, seeds, samples, seed)),
            SpreadEval::Auto { samples, seed } => match influence_spread_exact(graph, seeds) {
                Err(OracleError::TooManyEdges { .. }) => Ok(influence_spread_mc(graph, seeds, samples, seed)),
                other => other,
            },
        }
    }
}

/// Seed for the `round`-th stage of a multi-stage Monte Carlo computation.
pub fn stage_seed(seed: u64, round: usize) -> u64 {
    derive_seed(seed, &[round as u64])
}
