//! String identifiers and dispatch from an environment and its data to an
//! algorithm.

use std::fmt;
use std::str::FromStr;

use cmabt_core::Dataset;
use cmabt_envs::{EnvDataset, EnvKind, Environment};
use cmabt_oracles::Direction;
use serde::{Deserialize, Serialize};

use crate::cache::{clcb_llm_c, clcb_llm_std, lec, lfu};
use crate::error::{AlgoError, Result};
use crate::im::clcb_im_n;
use crate::offline::{clcb, clcb_cascade, cucb_offline, emp};
use crate::oracle::{Oracle, PathOracle, TopKOracle};
use crate::output::AlgorithmOutput;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum AlgorithmId {
    Clcb,
    ClcbCascade,
    ClcbLlmStd,
    ClcbLlmC,
    CucbLlmS,
    ClcbImN,
    CucbOffline,
    Emp,
    Lfu,
    Lec,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 10] = [
        AlgorithmId::Clcb,
        AlgorithmId::ClcbCascade,
        AlgorithmId::ClcbLlmStd,
        AlgorithmId::ClcbLlmC,
        AlgorithmId::CucbLlmS,
        AlgorithmId::ClcbImN,
        AlgorithmId::CucbOffline,
        AlgorithmId::Emp,
        AlgorithmId::Lfu,
        AlgorithmId::Lec,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmId::Clcb => "clcb",
            AlgorithmId::ClcbCascade => "clcb-cascade",
            AlgorithmId::ClcbLlmStd => "clcb-llm-std",
            AlgorithmId::ClcbLlmC => "clcb-llm-c",
            AlgorithmId::CucbLlmS => "cucb-llm-s",
            AlgorithmId::ClcbImN => "clcb-im-n",
            AlgorithmId::CucbOffline => "cucb-offline",
            AlgorithmId::Emp => "emp",
            AlgorithmId::Lfu => "lfu",
            AlgorithmId::Lec => "lec",
        }
    }

    /// Whether the algorithm runs offline on data from `env`.
    pub fn supports(self, env: EnvKind) -> bool {
        use AlgorithmId::*;
        match env {
            EnvKind::Cascading => matches!(self, Clcb | ClcbCascade | CucbOffline | Emp),
            EnvKind::Kpath => matches!(self, Clcb | CucbOffline | Emp),
            EnvKind::Cache => matches!(self, ClcbLlmStd | ClcbLlmC | Lfu | Lec),
            EnvKind::Ic => matches!(self, ClcbImN),
        }
    }

    pub fn check(self, env: EnvKind) -> Result<()> {
        if self.supports(env) {
            Ok(())
        } else {
            Err(AlgoError::Unsupported {
                alg: self.to_string(),
                env: env.to_string(),
            })
        }
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgorithmId {
    type Err = AlgoError;

    fn from_str(s: &str) -> Result<Self> {
        AlgorithmId::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| AlgoError::UnknownAlgorithm(s.to_string()))
    }
}

impl TryFrom<String> for AlgorithmId {
    type Error = AlgoError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<AlgorithmId> for String {
    fn from(a: AlgorithmId) -> Self {
        a.as_str().to_string()
    }
}

/// Tunables that only some algorithms read.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    pub delta: f64,
    /// Greedy IM budget per spread evaluation.
    pub mc_per_eval: Option<usize>,
    /// Seed for any randomness inside the algorithm.
    pub seed: u64,
}

fn arms(alg: AlgorithmId, data: &EnvDataset) -> Result<&Dataset> {
    match data {
        EnvDataset::Arms(d) => Ok(d),
        _ => Err(AlgoError::InvalidParams(format!("{alg} needs an arm-level dataset"))),
    }
}

/// Runs `alg` on `data` collected from `env`.
pub fn run_offline(alg: AlgorithmId, env: &Environment, data: &EnvDataset, p: &RunParams) -> Result<AlgorithmOutput> {
    alg.check(env.kind())?;
    let oracle: Box<dyn Oracle> = match env {
        Environment::Cascading { instance, .. } => Box::new(TopKOracle::ranked(instance.k())),
        Environment::KPath { instance } => Box::new(PathOracle { k: instance.k() }),
        _ => Box::new(TopKOracle::set(0)),
    };
    match (alg, env, data) {
        (AlgorithmId::Clcb, ..) => clcb(arms(alg, data)?, oracle.as_ref(), p.delta),
        (AlgorithmId::ClcbCascade, Environment::Cascading { instance, .. }, _) => {
            clcb_cascade(arms(alg, data)?, instance.k(), p.delta)
        }
        (AlgorithmId::CucbOffline, ..) => cucb_offline(arms(alg, data)?, oracle.as_ref(), p.delta),
        (AlgorithmId::Emp, ..) => emp(arms(alg, data)?, oracle.as_ref(), Direction::Max),
        (AlgorithmId::ClcbLlmStd, Environment::Cache { instance, .. }, EnvDataset::Cache(d)) => {
            clcb_llm_std(d, instance.k(), p.delta)
        }
        (AlgorithmId::ClcbLlmC, Environment::Cache { instance, .. }, EnvDataset::Cache(d)) => {
            clcb_llm_c(d, instance.k(), p.delta)
        }
        (AlgorithmId::Lfu, Environment::Cache { instance, .. }, EnvDataset::Cache(d)) => lfu(d, instance.k()),
        (AlgorithmId::Lec, Environment::Cache { instance, .. }, EnvDataset::Cache(d)) => lec(d, instance.k()),
        (AlgorithmId::ClcbImN, Environment::Ic { instance, k }, EnvDataset::Cascades { cascades, .. }) => {
            clcb_im_n(cascades, instance.graph(), *k, p.delta, p.mc_per_eval, p.seed)
        }
        _ => Err(AlgoError::InvalidParams(format!(
            "{alg} received data that does not match a {} environment",
            env.kind()
        ))),
    }
}
