//! Influence maximisation from node-level feedback: only the seed set and
//! the one-step active set of each diffusion are used.

use cmabt_core::{variance_adaptive_interval, Action};
use cmabt_envs::Cascade;
use cmabt_oracles::{greedy_im, OracleError, WeightedGraph, DEFAULT_MC_PER_EVAL};

use crate::error::{AlgoError, Result};
use crate::output::AlgorithmOutput;

/// `clip01((1/q_bar)(1 - p_bar / p_lower))`, 0 when `p_lower` is 0.
pub fn edge_lcb(q_bar: f64, p_bar: f64, p_lower: f64) -> f64 {
    if p_lower <= 0.0 || q_bar <= 0.0 {
        return 0.0;
    }
    ((1.0 - p_bar / p_lower) / q_bar).clamp(0.0, 1.0)
}

/// Intermediate bounds for one edge `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeBounds {
    /// Upper bound on the seed probability of `u`.
    pub q_bar: f64,
    /// Upper bound on `P[v not in S_1]`.
    pub p_bar: f64,
    /// Lower bound on `P[v not in S_1 | u not in S_0]`.
    pub p_lower: f64,
    pub lcb: f64,
}

/// Per-edge lower bounds on the activation probabilities of `topology`
/// (its weights are ignored).
pub fn im_edge_bounds(cascades: &[Cascade], topology: &WeightedGraph, delta: f64) -> Result<Vec<EdgeBounds>> {
    if cascades.is_empty() {
        return Err(AlgoError::EmptyDataset);
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(AlgoError::InvalidParams(format!("delta must lie in (0,1), got {delta}")));
    }
    let v_count = topology.node_count();
    let n = cascades.len();
    let e = topology.edge_count().max(1);
    let delta_prime = delta / (12.0 * n as f64 * e as f64);

    let mut seeded = vec![0u64; v_count];
    let mut inactive = vec![0u64; v_count];
    // n_{1, u-bar, v-bar} per edge
    let mut joint = vec![0u64; topology.edge_count()];
    let mut in_s0 = vec![false; v_count];
    let mut in_s1 = vec![false; v_count];
    for (idx, c) in cascades.iter().enumerate() {
        let s0 = c.first().ok_or_else(|| AlgoError::InvalidParams(format!("cascade {idx} is empty")))?;
        let s1 = c.get(1).unwrap_or(s0);
        in_s0.iter_mut().for_each(|x| *x = false);
        in_s1.iter_mut().for_each(|x| *x = false);
        for &u in s0 {
            if u >= v_count {
                return Err(AlgoError::InvalidParams(format!("cascade {idx} mentions node {u}")));
            }
            in_s0[u] = true;
        }
        for &v in s1 {
            if v >= v_count {
                return Err(AlgoError::InvalidParams(format!("cascade {idx} mentions node {v}")));
            }
            in_s1[v] = true;
        }
        for v in 0..v_count {
            seeded[v] += u64::from(in_s0[v]);
            inactive[v] += u64::from(!in_s1[v]);
        }
        for (i, edge) in topology.edges().iter().enumerate() {
            joint[i] += u64::from(!in_s0[edge.from] && !in_s1[edge.to]);
        }
    }

    let nf = n as f64;
    let bounds = topology
        .edges()
        .iter()
        .zip(&joint)
        .map(|(edge, &j)| {
            let q_hat = seeded[edge.from] as f64 / nf;
            let q_bar = (q_hat + variance_adaptive_interval(q_hat, n as u64, delta_prime)).min(1.0);
            let pv_hat = inactive[edge.to] as f64 / nf;
            let p_bar = (pv_hat + variance_adaptive_interval(pv_hat, n as u64, delta_prime)).min(1.0);
            let absent = n as u64 - seeded[edge.from];
            let p_lower = if absent == 0 {
                0.0
            } else {
                let cond = j as f64 / absent as f64;
                (cond - variance_adaptive_interval(cond, absent, delta_prime)).max(0.0)
            };
            EdgeBounds {
                q_bar,
                p_bar,
                p_lower,
                lcb: edge_lcb(q_bar, p_bar, p_lower),
            }
        })
        .collect();
    Ok(bounds)
}

/// Builds the lower-bound graph and hands it to `solver`.
pub fn clcb_im_n_with<F>(
    cascades: &[Cascade],
    topology: &WeightedGraph,
    delta: f64,
    solver: F,
) -> Result<AlgorithmOutput>
where
    F: FnOnce(&WeightedGraph) -> std::result::Result<Action, OracleError>,
{
    let b = im_edge_bounds(cascades, topology, delta)?;
    let lcbs: Vec<f64> = b.iter().map(|x| x.lcb).collect();
    let graph = topology.with_weights(&lcbs)?;
    let seeds = solver(&graph)?;
    let q_bar: Vec<f64> = b.iter().map(|x| x.q_bar).collect();
    let p_bar: Vec<f64> = b.iter().map(|x| x.p_bar).collect();
    let p_lower: Vec<f64> = b.iter().map(|x| x.p_lower).collect();
    Ok(AlgorithmOutput::new(seeds)
        .with_vector("lcb", &lcbs)
        .with_vector("q_bar", &q_bar)
        .with_vector("p_bar", &p_bar)
        .with_vector("p_lower", &p_lower))
}

/// Greedy IM with `mc_per_eval` diffusions per evaluation on the
/// lower-bound graph.
pub fn clcb_im_n(
    cascades: &[Cascade],
    topology: &WeightedGraph,
    k: usize,
    delta: f64,
    mc_per_eval: Option<usize>,
    seed: u64,
) -> Result<AlgorithmOutput> {
    let mc = mc_per_eval.unwrap_or(DEFAULT_MC_PER_EVAL);
    clcb_im_n_with(cascades, topology, delta, |g| greedy_im(g, k, mc, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use cmabt_envs::{ic_generate, IcInstance};

    #[test]
    fn edge_lcb_examples() {
        assert_eq!(edge_lcb(1.0, 1.0, 1.0), 0.0);
        assert!((edge_lcb(0.5, 0.6, 0.8) - 0.5).abs() < 1e-15);
        assert_eq!(edge_lcb(0.5, 0.9, 0.6), 0.0);
        assert_eq!(edge_lcb(0.5, 0.3, 0.0), 0.0);
        assert_eq!(edge_lcb(0.1, 0.0, 1.0), 1.0);
    }

    #[test]
    fn always_seeded_source_gets_zero() {
        let g = WeightedGraph::from_triples(2, &[(0, 1, 0.5)]).unwrap();
        let c: Vec<Cascade> = (0..10).map(|_| vec![vec![0], vec![0, 1]]).collect();
        let b = im_edge_bounds(&c, &g, 0.1).unwrap();
        assert_eq!(b[0].p_lower, 0.0);
        assert_eq!(b[0].lcb, 0.0);
    }

    #[test]
    fn bounds_are_pessimistic_with_plenty_of_data() {
        let g = WeightedGraph::from_triples(3, &[(0, 1, 0.6), (2, 1, 0.3), (1, 2, 0.5)]).unwrap();
        let inst = IcInstance::new(g.clone(), vec![0.5, 0.3, 0.4]).unwrap();
        let data = ic_generate(&inst, 20_000, 3);
        let b = im_edge_bounds(&data, &g, 0.1).unwrap();
        for (edge, eb) in g.edges().iter().zip(&b) {
            assert!(eb.lcb <= edge.p, "{edge:?}: {eb:?}");
            assert!(eb.q_bar >= inst.seed_probs()[edge.from]);
            assert!(eb.p_bar >= inst.p_not_activated(edge.to));
            assert!(eb.p_lower <= inst.p_not_activated_given_absent(edge.from, edge.to));
        }
        // the strongest edge is learned to be clearly positive
        assert!(b[0].lcb > 0.2);
    }

    #[test]
    fn picks_hub_on_star() {
        let g = WeightedGraph::from_triples(4, &[(0, 1, 0.9), (0, 2, 0.9), (0, 3, 0.9)]).unwrap();
        let inst = IcInstance::new(g.clone(), vec![0.5, 0.3, 0.3, 0.3]).unwrap();
        let data = ic_generate(&inst, 5000, 1);
        let out = clcb_im_n(&data, &g, 1, 0.1, Some(200), 2).unwrap();
        assert_eq!(out.action, Action::set([0]).unwrap());
        assert_eq!(out.vector("lcb").len(), 3);
    }

    #[test]
    fn rejects_bad_input() {
        let g = WeightedGraph::from_triples(2, &[(0, 1, 0.5)]).unwrap();
        assert!(matches!(im_edge_bounds(&[], &g, 0.1), Err(AlgoError::EmptyDataset)));
        assert!(im_edge_bounds(&[vec![vec![5]]], &g, 0.1).is_err());
    }
}
