//! Instance files and a uniform front end over the four environments.
//!
//! Instance files are JSON objects tagged by `"type"`:
//!
//! ```json
//! {"type": "cascading", "m": 100, "k": 5, "instance_seed": 7}
//! {"type": "cache", "p": [0.5, 0.5], "c": [1.0, 0.2], "k": 1, "collection": {"kind": "empty"}}
//! {"type": "ic", "graph": {"nodes": 2, "edges": [[0, 1, 0.5]]}, "seed_probs": [0.5, 0.5], "k": 1}
//! {"type": "kpath", "m": 8, "k": 2, "c_inf": 4.0}
//! ```
//!
//! Explicit parameters win over synthetic ones; synthetic fields are drawn
//! from `instance_seed`.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::io::Write;

use cmabt_core::Dataset;
use serde::{Deserialize, Serialize};

use crate::cache::{cache_generate, CacheCollection, CacheDataset, CacheInstance, CostNoise};
use crate::cascading::{cascade_generate, CascadingInstance, PositionSampler};
use crate::error::{EnvError, Result};
use crate::ic::{ic_generate, write_cascades_jsonl, Cascade, IcInstance, RandomIcSpec};
use crate::kpath::{kpath_generate, KPathInstance};
use cmabt_oracles::WeightedGraph;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum InstanceSpec {
    Cascading(CascadingSpec),
    Cache(CacheSpec),
    Ic(IcSpec),
    Kpath(KPathSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CascadingSpec {
    #[serde(default)]
    pub mu: Option<Vec<f64>>,
    #[serde(default)]
    pub m: Option<usize>,
    pub k: usize,
    #[serde(default)]
    pub instance_seed: u64,
    #[serde(default)]
    pub sampler: PositionSampler,
}

fn default_alpha() -> f64 {
    0.9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CacheSpec {
    #[serde(default)]
    pub p: Option<Vec<f64>>,
    #[serde(default)]
    pub c: Option<Vec<f64>>,
    #[serde(default)]
    pub m: Option<usize>,
    /// Power-law exponent for synthetic arrivals.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub k: usize,
    #[serde(default)]
    pub noise: CostNoise,
    #[serde(default)]
    pub instance_seed: u64,
    #[serde(default)]
    pub collection: CacheCollection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IcSpec {
    #[serde(default)]
    pub graph: Option<WeightedGraph>,
    #[serde(default)]
    pub seed_probs: Option<Vec<f64>>,
    #[serde(default)]
    pub random: Option<RandomIcSpec>,
    #[serde(default)]
    pub instance_seed: u64,
    /// Seed-set size.
    pub k: usize,
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KPathSpec {
    pub m: usize,
    pub k: usize,
    #[serde(default)]
    pub path_means: Option<Vec<f64>>,
    #[serde(default)]
    pub collection_probs: Option<Vec<f64>>,
    /// Builds the two-point hard instance with this coverage when the
    /// explicit vectors are absent.
    #[serde(default)]
    pub c_inf: Option<f64>,
    #[serde(default)]
    pub gap: Option<f64>,
}

/// A built environment together with its data-collection distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum Environment {
    Cascading { instance: CascadingInstance, sampler: PositionSampler },
    Cache { instance: CacheInstance, collection: CacheCollection },
    Ic { instance: IcInstance, k: usize },
    KPath { instance: KPathInstance },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvKind {
    Cascading,
    Cache,
    Ic,
    Kpath,
}

impl std::fmt::Display for EnvKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EnvKind::Cascading => "cascading",
            EnvKind::Cache => "cache",
            EnvKind::Ic => "ic",
            EnvKind::Kpath => "kpath",
        })
    }
}

fn missing(what: &str) -> EnvError {
    EnvError::InvalidInstance(format!("missing {what}"))
}

impl InstanceSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| EnvError::InvalidInstance(e.to_string()))
    }

    pub fn build(&self) -> Result<Environment> {
        match self {
            InstanceSpec::Cascading(s) => {
                let instance = match (&s.mu, s.m) {
                    (Some(mu), _) => CascadingInstance::new(mu.clone(), s.k)?,
                    (None, Some(m)) => CascadingInstance::synthetic(m, s.k, s.instance_seed)?,
                    (None, None) => return Err(missing("`mu` or `m`")),
                };
                s.sampler.validate(&instance)?;
                Ok(Environment::Cascading {
                    instance,
                    sampler: s.sampler.clone(),
                })
            }
            InstanceSpec::Cache(s) => {
                let instance = match (&s.p, &s.c, s.m) {
                    (Some(p), Some(c), _) => CacheInstance::new(p.clone(), c.clone(), s.k, s.noise)?,
                    (None, None, Some(m)) => CacheInstance::synthetic(m, s.k, s.alpha, s.noise, s.instance_seed)?,
                    _ => return Err(missing("both `p` and `c`, or `m`")),
                };
                s.collection.validate(instance.m())?;
                Ok(Environment::Cache {
                    instance,
                    collection: s.collection.clone(),
                })
            }
            InstanceSpec::Ic(s) => {
                let mut instance = match (&s.graph, &s.seed_probs, &s.random) {
                    (Some(g), Some(q), _) => IcInstance::new(g.clone(), q.clone())?,
                    (None, None, Some(r)) => IcInstance::random(*r, s.instance_seed)?,
                    _ => return Err(missing("`graph` and `seed_probs`, or `random`")),
                };
                if s.k > instance.node_count() {
                    return Err(EnvError::InvalidInstance(format!(
                        "seed-set size {} exceeds {} nodes",
                        s.k,
                        instance.node_count()
                    )));
                }
                if let (Some(eta), Some(gamma)) = (s.eta, s.gamma) {
                    instance = instance.with_bounds(eta, gamma);
                }
                Ok(Environment::Ic { instance, k: s.k })
            }
            InstanceSpec::Kpath(s) => {
                let instance = match (&s.path_means, &s.collection_probs, s.c_inf) {
                    (Some(mu), Some(p), _) => KPathInstance::new(s.m, s.k, mu.clone(), p.clone())?,
                    (None, None, Some(c)) => KPathInstance::hard_instance(s.m, s.k, c, s.gap.unwrap_or(0.1))?,
                    _ => return Err(missing("`path_means` and `collection_probs`, or `c_inf`")),
                };
                Ok(Environment::KPath { instance })
            }
        }
    }
}

/// Offline data of any environment.
#[derive(Debug, Clone, PartialEq)]
pub enum EnvDataset {
    Arms(Dataset),
    Cache(CacheDataset),
    Cascades { nodes: usize, cascades: Vec<Cascade> },
}

impl EnvDataset {
    pub fn len(&self) -> usize {
        match self {
            EnvDataset::Arms(d) => d.len(),
            EnvDataset::Cache(d) => d.len(),
            EnvDataset::Cascades { cascades, .. } => cascades.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn write_jsonl<W: Write>(&self, w: W) -> cmabt_core::Result<()> {
        match self {
            EnvDataset::Arms(d) => d.write_jsonl(w),
            EnvDataset::Cache(d) => d.write_jsonl(w),
            EnvDataset::Cascades { cascades, .. } => write_cascades_jsonl(cascades, w),
        }
    }

    /// Hash of the serialised records.
    pub fn fingerprint(&self) -> u64 {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        let mut h = DefaultHasher::new();
        buf.hash(&mut h);
        h.finish()
    }
}

impl Environment {
    pub fn kind(&self) -> EnvKind {
        match self {
            Environment::Cascading { .. } => EnvKind::Cascading,
            Environment::Cache { .. } => EnvKind::Cache,
            Environment::Ic { .. } => EnvKind::Ic,
            Environment::KPath { .. } => EnvKind::Kpath,
        }
    }

    /// Number of base arms in the environment's native arm view.
    pub fn arm_count(&self) -> usize {
        match self {
            Environment::Cascading { instance, .. } => instance.m(),
            Environment::Cache { instance, .. } => instance.m(),
            Environment::Ic { instance, .. } => instance.graph().edge_count(),
            Environment::KPath { instance } => instance.m(),
        }
    }

    pub fn generate(&self, n: usize, seed: u64) -> Result<EnvDataset> {
        Ok(match self {
            Environment::Cascading { instance, sampler } => {
                EnvDataset::Arms(cascade_generate(instance, sampler, n, seed)?)
            }
            Environment::Cache { instance, collection } => {
                EnvDataset::Cache(cache_generate(instance, collection, n, seed)?)
            }
            Environment::Ic { instance, .. } => EnvDataset::Cascades {
                nodes: instance.node_count(),
                cascades: ic_generate(instance, n, seed),
            },
            Environment::KPath { instance } => EnvDataset::Arms(kpath_generate(instance, n, seed)?),
        })
    }
}
