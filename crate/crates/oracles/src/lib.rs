//! Combinatorial oracles: bounded-heap top-k, greedy influence maximisation
//! over independent-cascade graphs, and exhaustive reference search.

pub mod brute;
pub mod error;
pub mod graph;
pub mod greedy;
pub mod spread;
pub mod topk;

pub use brute::{brute_force_best, Explicit, FeasibleSet, OrderedLists, Subsets, BRUTE_FORCE_LIMIT};
pub use error::{OracleError, Result};
pub use graph::{Edge, WeightedGraph};
pub use greedy::{greedy_im, greedy_im_with, DEFAULT_MC_PER_EVAL, GREEDY_RATIO};
pub use spread::{
    diffuse, influence_spread, influence_spread_exact, influence_spread_mc, SpreadEval, EXACT_EDGE_LIMIT,
};
pub use topk::{top_k, top_k_indices, top_k_list, Direction};
