//! Ground-truth environments: cascading ranking, LLM response caching,
//! independent-cascade influence and the k-path instance. Each exposes exact
//! reward evaluation, a data-collection distribution and a seeded offline
//! dataset generator.

pub mod cache;
pub mod cascading;
pub mod error;
pub mod ic;
pub mod kpath;
pub mod spec;

pub use cache::{cache_generate, power_law, CacheCollection, CacheDataset, CacheInstance, CacheRecord, CostNoise};
pub use cascading::{cascade_generate, CascadingInstance, PositionSampler};
pub use error::{EnvError, Result};
pub use ic::{ic_generate, read_cascades_jsonl, write_cascades_jsonl, Cascade, IcInstance, RandomIcSpec};
pub use kpath::{kpath_generate, KPathInstance};
pub use spec::{EnvDataset, EnvKind, Environment, InstanceSpec};
