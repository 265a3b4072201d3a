//! Independent-cascade influence instances with node-level feedback.

use std::io::{BufRead, Write};

use cmabt_core::{rng_from_seed, Action, ActionKind, ArmId, CoreError, CoverageModel};
use cmabt_oracles::{
    brute_force_best, diffuse, graph::Edge, spread::diffuse_count, SpreadEval, Subsets, WeightedGraph,
};
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{EnvError, Result};

/// One diffusion record: cumulative active sets `S_0..S_{V-1}`.
pub type Cascade = Vec<Vec<usize>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IcInstance {
    graph: WeightedGraph,
    /// Independent seed probability `q_v` of each node.
    seed_probs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
}

/// Random directed graph with i.i.d. edge presence and uniform weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomIcSpec {
    pub nodes: usize,
    pub edge_prob: f64,
    pub weight_range: (f64, f64),
    pub seed_prob_range: (f64, f64),
}

impl IcInstance {
    pub fn new(graph: WeightedGraph, seed_probs: Vec<f64>) -> Result<Self> {
        if seed_probs.len() != graph.node_count() {
            return Err(EnvError::InvalidInstance(format!(
                "{} seed probabilities for {} nodes",
                seed_probs.len(),
                graph.node_count()
            )));
        }
        if let Some(q) = seed_probs.iter().find(|q| !(0.0..=1.0).contains(*q)) {
            return Err(EnvError::InvalidInstance(format!("seed probability {q} outside [0,1]")));
        }
        Ok(IcInstance {
            graph,
            seed_probs,
            eta: None,
            gamma: None,
        })
    }

    /// Records the bounds that [`IcInstance::assumption_holds`] checks.
    pub fn with_bounds(mut self, eta: f64, gamma: f64) -> Self {
        self.eta = Some(eta);
        self.gamma = Some(gamma);
        self
    }

    pub fn random(spec: RandomIcSpec, instance_seed: u64) -> Result<Self> {
        let mut rng = rng_from_seed(instance_seed);
        let (wl, wh) = spec.weight_range;
        let (ql, qh) = spec.seed_prob_range;
        if !(0.0..=1.0).contains(&wl) || !(wl..=1.0).contains(&wh) || !(0.0..=1.0).contains(&ql) || !(ql..=1.0).contains(&qh) {
            return Err(EnvError::InvalidInstance("ranges must be ordered subsets of [0,1]".into()));
        }
        let mut edges = Vec::new();
        for u in 0..spec.nodes {
            for v in 0..spec.nodes {
                if u != v && rng.gen::<f64>() < spec.edge_prob {
                    edges.push(Edge {
                        from: u,
                        to: v,
                        p: rng.gen_range(wl..=wh),
                    });
                }
            }
        }
        let graph = WeightedGraph::new(spec.nodes, edges)?;
        let q = (0..spec.nodes).map(|_| rng.gen_range(ql..=qh)).collect();
        Self::new(graph, q)
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn seed_probs(&self) -> &[f64] {
        &self.seed_probs
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        self.eta.zip(self.gamma)
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    /// `P[v not in S_1]`.
    pub fn p_not_activated(&self, v: usize) -> f64 {
        self.p_not_activated_excluding(v, None)
    }

    /// `P[v not in S_1 | u not in S_0]`.
    pub fn p_not_activated_given_absent(&self, u: usize, v: usize) -> f64 {
        self.p_not_activated_excluding(v, Some(u))
    }

    fn p_not_activated_excluding(&self, v: usize, skip: Option<usize>) -> f64 {
        let q = &self.seed_probs;
        let mut p = 1.0 - q[v];
        for &ei in self.graph.in_edges(v) {
            let e = self.graph.edge(ei);
            if Some(e.from) != skip {
                p *= 1.0 - q[e.from] * e.p;
            }
        }
        p
    }

    /// Whether every edge triggerable from `s_star` has `q_u in [gamma, 1-gamma]`
    /// and `P[v not in S_1] >= eta`.
    pub fn assumption_holds(&self, s_star: &[usize], eta: f64, gamma: f64) -> bool {
        self.graph.triggerable_edges(s_star).into_iter().all(|ei| {
            let e = self.graph.edge(ei);
            let qu = self.seed_probs[e.from];
            (gamma..=1.0 - gamma).contains(&qu) && self.p_not_activated(e.to) >= eta
        })
    }

    pub fn sample_seeds(&self, rng: &mut dyn RngCore) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&v| rng.gen::<f64>() < self.seed_probs[v])
            .collect()
    }

    /// Spread of `seeds`: exact when enumerable, otherwise `mc` diffusions.
    pub fn spread(&self, seeds: &Action, mc: usize, seed: u64) -> Result<f64> {
        seeds.check_range(self.node_count())?;
        Ok(SpreadEval::Auto { samples: mc, seed }.eval(&self.graph, &seeds.indices())?)
    }

    /// Exhaustive best seed set of size `k` under `eval`.
    pub fn brute_force_optimum(&self, k: usize, eval: SpreadEval) -> Result<(Action, f64)> {
        let v = self.node_count();
        let err = std::cell::RefCell::new(None);
        let reward = |a: &Action, _: &[f64]| match eval.eval(&self.graph, &a.indices()) {
            Ok(x) => x,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                f64::NEG_INFINITY
            }
        };
        let best = brute_force_best(reward, &Subsets { m: v, size: k.min(v), up_to: false }, &[])?;
        match err.into_inner() {
            Some(e) => Err(e.into()),
            None => Ok(best),
        }
    }
}

/// `n` diffusion records with seeds drawn from the product distribution.
pub fn ic_generate(inst: &IcInstance, n: usize, seed: u64) -> Vec<Cascade> {
    let mut rng = rng_from_seed(seed);
    (0..n)
        .map(|_| {
            let s0 = inst.sample_seeds(&mut rng);
            diffuse(&inst.graph, &s0, &mut rng)
        })
        .collect()
}

pub fn write_cascades_jsonl<W: Write>(cascades: &[Cascade], mut w: W) -> cmabt_core::Result<()> {
    for c in cascades {
        serde_json::to_writer(&mut w, c).map_err(|e| CoreError::Io(e.to_string()))?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads cascades, checking node range and that steps are cumulative.
pub fn read_cascades_jsonl<R: BufRead>(reader: R, nodes: usize) -> cmabt_core::Result<Vec<Cascade>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let c: Cascade = serde_json::from_str(&line).map_err(|e| CoreError::Parse {
            line: i + 1,
            reason: e.to_string(),
        })?;
        let bad = |reason: String| CoreError::MalformedRecord { index: out.len(), reason };
        if c.is_empty() {
            return Err(bad("cascade has no steps".into()));
        }
        for (h, step) in c.iter().enumerate() {
            if let Some(v) = step.iter().find(|&&v| v >= nodes) {
                return Err(bad(format!("node {v} out of range")));
            }
            if h > 0 && !c[h - 1].iter().all(|v| step.contains(v)) {
                return Err(bad(format!("step {h} drops an active node")));
            }
        }
        out.push(c);
    }
    Ok(out)
}

/// Edge-level arm view: arm `i` is edge `i`, triggered when its source ends
/// up active.
impl CoverageModel for IcInstance {
    /// Product seed probabilities.
    type Collection = Vec<f64>;

    fn arm_count(&self) -> usize {
        self.graph.edge_count()
    }

    fn check_action(&self, action: &Action) -> cmabt_core::Result<()> {
        if action.kind() != ActionKind::Set {
            return Err(CoreError::InfeasibleAction("a seed set is a set of nodes".into()));
        }
        action.check_range(self.node_count())
    }

    fn sample_triggered(&self, action: &Action, rng: &mut dyn RngCore) -> Vec<ArmId> {
        let mut active = Vec::new();
        diffuse_count(&self.graph, &action.indices(), rng, &mut active);
        (0..self.graph.edge_count())
            .filter(|&i| active[self.graph.edge(i).from])
            .map(ArmId)
            .collect()
    }

    fn sample_collection(&self, dist: &Vec<f64>, rng: &mut dyn RngCore) -> cmabt_core::Result<Action> {
        Action::set((0..self.node_count()).filter(|&v| rng.gen::<f64>() < dist[v]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(v: usize, edges: &[(usize, usize, f64)], q: &[f64]) -> IcInstance {
        IcInstance::new(WeightedGraph::from_triples(v, edges).unwrap(), q.to_vec()).unwrap()
    }

    #[test]
    fn no_seeds_no_activity() {
        let i = inst(3, &[(0, 1, 1.0), (1, 2, 1.0)], &[0.0; 3]);
        for c in ic_generate(&i, 50, 1) {
            assert_eq!(c.len(), 3);
            assert!(c.iter().all(Vec::is_empty));
        }
    }

    #[test]
    fn deterministic_flood() {
        let i = inst(4, &[(0, 1, 1.0), (1, 2, 1.0), (1, 3, 1.0)], &[1.0, 0.0, 0.0, 0.0]);
        for c in ic_generate(&i, 20, 2) {
            assert_eq!(c[0], vec![0]);
            assert_eq!(c[3], vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn one_step_activation_frequency() {
        let n = 20_000;
        let i = inst(2, &[(0, 1, 0.5)], &[1.0, 0.0]);
        let hits = ic_generate(&i, n, 3).iter().filter(|c| c[1].contains(&1)).count() as f64 / n as f64;
        assert!((hits - 0.5).abs() <= 3.0 * (0.25 / n as f64).sqrt());
    }

    // Enumerates all seed patterns of v and its in-neighbours.
    fn p_not_enumerated(i: &IcInstance, v: usize, absent: Option<usize>) -> f64 {
        let g = i.graph();
        let ins: Vec<_> = g.in_edges(v).iter().map(|&e| g.edge(e)).collect();
        let mut total = 0.0;
        let mut mass = 0.0;
        for mask in 0u32..(1 << (ins.len() + 1)) {
            let seeded = |j: usize| mask >> j & 1 == 1;
            let mut w = if seeded(0) { i.seed_probs()[v] } else { 1.0 - i.seed_probs()[v] };
            let mut stay = if seeded(0) { 0.0 } else { 1.0 };
            for (j, e) in ins.iter().enumerate() {
                let s = seeded(j + 1);
                if absent == Some(e.from) && s {
                    w = 0.0;
                }
                w *= if s { i.seed_probs()[e.from] } else { 1.0 - i.seed_probs()[e.from] };
                if s {
                    stay *= 1.0 - e.p;
                }
            }
            total += w * stay;
            mass += w;
        }
        total / mass
    }

    #[test]
    fn non_activation_closed_form_matches_enumeration() {
        let i = inst(
            5,
            &[(0, 4, 0.3), (1, 4, 0.8), (2, 4, 0.5), (3, 4, 0.1), (4, 0, 0.6)],
            &[0.4, 0.3, 0.6, 0.5, 0.2],
        );
        assert!((i.p_not_activated(4) - p_not_enumerated(&i, 4, None)).abs() < 1e-14);
        for u in 0..4 {
            assert!((i.p_not_activated_given_absent(u, 4) - p_not_enumerated(&i, 4, Some(u))).abs() < 1e-14);
        }
        let n = 50_000;
        let freq = ic_generate(&i, n, 9).iter().filter(|c| !c[1].contains(&4)).count() as f64 / n as f64;
        let p = i.p_not_activated(4);
        assert!((freq - p).abs() <= 4.0 * (p * (1.0 - p) / n as f64).sqrt());
    }

    #[test]
    fn assumption_check() {
        let i = inst(3, &[(0, 1, 0.5), (2, 0, 0.5)], &[0.5, 0.3, 0.9]);
        // edge (0,1) is triggerable from {0}: q_0 = 0.5 and P[1 not in S_1] = 0.7*0.75
        assert!(i.assumption_holds(&[0], 0.5, 0.3));
        assert!(!i.assumption_holds(&[0], 0.6, 0.3));
        // from {2} the edge (2,0) needs q_2 <= 0.7
        assert!(!i.assumption_holds(&[2], 0.1, 0.3));
    }

    #[test]
    fn cascades_round_trip() {
        let i = IcInstance::random(
            RandomIcSpec { nodes: 6, edge_prob: 0.3, weight_range: (0.2, 0.8), seed_prob_range: (0.1, 0.5) },
            4,
        )
        .unwrap();
        let cs = ic_generate(&i, 30, 5);
        let mut buf = Vec::new();
        write_cascades_jsonl(&cs, &mut buf).unwrap();
        assert_eq!(read_cascades_jsonl(buf.as_slice(), 6).unwrap(), cs);
        assert!(read_cascades_jsonl("[[0,1],[1]]".as_bytes(), 6).is_err());
        assert!(read_cascades_jsonl("[[9]]".as_bytes(), 6).is_err());
        assert_eq!(cs, ic_generate(&i, 30, 5));
    }

    #[test]
    fn brute_force_optimum_on_line() {
        let i = inst(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 0.1)], &[0.5; 4]);
        let (a, v) = i.brute_force_optimum(1, SpreadEval::Exact).unwrap();
        assert_eq!(a, Action::set([0]).unwrap());
        assert!((v - 3.1).abs() < 1e-12);
        assert!((i.spread(&a, 10, 0).unwrap() - 3.1).abs() < 1e-12);
    }
}
