//! Directed weighted graphs for independent-cascade diffusion.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{OracleError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(usize, usize, f64)", into = "(usize, usize, f64)")]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub p: f64,
}

impl From<(usize, usize, f64)> for Edge {
    fn from((from, to, p): (usize, usize, f64)) -> Self {
        Edge { from, to, p }
    }
}

impl From<Edge> for (usize, usize, f64) {
    fn from(e: Edge) -> Self {
        (e.from, e.to, e.p)
    }
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    nodes: usize,
    edges: Vec<Edge>,
}

/// `G(V, E, p)`. Wire format: `{"nodes": V, "edges": [[u, v, p], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct WeightedGraph {
    nodes: usize,
    edges: Vec<Edge>,
    // edge indices leaving each node
    out: Vec<Vec<usize>>,
    // edge indices entering each node
    inc: Vec<Vec<usize>>,
}

impl TryFrom<RawGraph> for WeightedGraph {
    type Error = OracleError;

    fn try_from(raw: RawGraph) -> Result<Self> {
        WeightedGraph::new(raw.nodes, raw.edges)
    }
}

impl From<WeightedGraph> for RawGraph {
    fn from(g: WeightedGraph) -> Self {
        RawGraph {
            nodes: g.nodes,
            edges: g.edges,
        }
    }
}

impl WeightedGraph {
    pub fn new(nodes: usize, edges: Vec<Edge>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = vec![Vec::new(); nodes];
        let mut inc = vec![Vec::new(); nodes];
        for (i, e) in edges.iter().enumerate() {
            if e.from >= nodes || e.to >= nodes {
                return Err(OracleError::Graph(format!(
                    "edge ({}, {}) references a node outside 0..{nodes}",
                    e.from, e.to
                )));
            }
            if e.from == e.to {
                return Err(OracleError::Graph(format!("self-loop at node {}", e.from)));
            }
            if !(0.0..=1.0).contains(&e.p) {
                return Err(OracleError::Graph(format!(
                    "edge ({}, {}) weight {} outside [0,1]",
                    e.from, e.to, e.p
                )));
            }
            if !seen.insert((e.from, e.to)) {
                return Err(OracleError::Graph(format!(
                    "duplicate edge ({}, {})",
                    e.from, e.to
                )));
            }
            out[e.from].push(i);
            inc[e.to].push(i);
        }
        Ok(WeightedGraph {
            nodes,
            edges,
            out,
            inc,
        })
    }

    pub fn from_triples(nodes: usize, triples: &[(usize, usize, f64)]) -> Result<Self> {
        Self::new(nodes, triples.iter().map(|&t| Edge::from(t)).collect())
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> Edge {
        self.edges[i]
    }

    pub fn out_edges(&self, node: usize) -> &[usize] {
        &self.out[node]
    }

    pub fn in_edges(&self, node: usize) -> &[usize] {
        &self.inc[node]
    }

    pub fn max_out_degree(&self) -> usize {
        self.out.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Same topology with new weights, in edge order.
    pub fn with_weights(&self, weights: &[f64]) -> Result<Self> {
        assert_eq!(weights.len(), self.edges.len());
        let edges = self
            .edges
            .iter()
            .zip(weights)
            .map(|(e, &p)| Edge { p, ..*e })
            .collect();
        Self::new(self.nodes, edges)
    }

    /// Nodes reachable from `seeds` through positive-weight edges, seeds included.
    pub fn reachable_from(&self, seeds: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.nodes];
        let mut stack: Vec<usize> = Vec::new();
        for &s in seeds {
            if !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
        while let Some(u) = stack.pop() {
            for &ei in &self.out[u] {
                let e = self.edges[ei];
                if e.p > 0.0 && !seen[e.to] {
                    seen[e.to] = true;
                    stack.push(e.to);
                }
            }
        }
        seen
    }

    /// Edges whose source can become active from `seeds`; these are the
    /// edges the seed set can trigger.
    pub fn triggerable_edges(&self, seeds: &[usize]) -> Vec<usize> {
        let reach = self.reachable_from(seeds);
        (0..self.edges.len())
            .filter(|&i| reach[self.edges[i].from])
            .collect()
    }
}
