//! Offline learners for combinatorial semi-bandits with probabilistically
//! triggered arms, their baselines, and the streaming cache learner.

pub mod cache;
pub mod error;
pub mod im;
pub mod offline;
pub mod oracle;
pub mod output;
pub mod registry;
pub mod stream;

pub use cache::{clcb_llm_c, clcb_llm_std, lec, lfu, CacheStats};
pub use error::{AlgoError, Result};
pub use im::{clcb_im_n, clcb_im_n_with, edge_lcb, im_edge_bounds, EdgeBounds};
pub use offline::{clcb, clcb_cascade, clcb_with, cucb_offline, emp};
pub use oracle::{Oracle, PathOracle, TopKOracle};
pub use output::AlgorithmOutput;
pub use registry::{run_offline, AlgorithmId, RunParams};
pub use stream::{cucb_llm_s, cucb_llm_s_with, LcbRefresh, OnlineRun, StepKind, StreamState};
