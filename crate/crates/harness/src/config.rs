//! Experiment configuration files (JSON).
//!
//! ```json
//! {
//!   "name": "cascading-synthetic",
//!   "env": {"type": "cascading", "m": 100, "k": 5, "instance_seed": 1},
//!   "algorithms": ["clcb", "cucb-offline", "emp"],
//!   "n_values": [16, 32, 64],
//!   "trials": 20,
//!   "base_seed": 2024,
//!   "delta": 0.1,
//!   "output": "results/cascading.csv"
//! }
//! ```
//!
//! `env_file` may replace `env`; relative paths resolve against the config
//! file's directory. When `OFFCMAB_OUTPUT_DIR` is set, a relative `output`
//! resolves against it instead. No other environment variable is read.

use std::path::{Path, PathBuf};

use cmabt_algos::{AlgorithmId, LcbRefresh};
use cmabt_envs::{Environment, InstanceSpec};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const OUTPUT_DIR_VAR: &str = "OFFCMAB_OUTPUT_DIR";

/// How the reference optimum is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum OptimumMode {
    /// Exact optimum (closed form or exhaustive search).
    #[default]
    BruteForce,
    /// Greedy seed set evaluated with `mc` diffusions per candidate;
    /// defaults to ten times `mc_per_eval`.
    GreedyReference {
        #[serde(default)]
        mc: Option<usize>,
    },
}

fn default_trials() -> usize {
    20
}

fn default_delta() -> f64 {
    0.1
}

fn default_eval_mc() -> usize {
    10_000
}

fn default_coverage_mc() -> usize {
    100_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Environment label used in result rows; defaults to the instance type.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub env: Option<InstanceSpec>,
    #[serde(default)]
    pub env_file: Option<PathBuf>,
    #[serde(default)]
    pub algorithms: Vec<AlgorithmId>,
    #[serde(default)]
    pub n_values: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub optimum: OptimumMode,
    /// Greedy IM budget per spread evaluation inside algorithms.
    #[serde(default)]
    pub mc_per_eval: Option<usize>,
    /// Diffusions per spread evaluation when scoring seed sets.
    #[serde(default = "default_eval_mc")]
    pub eval_mc: usize,
    #[serde(default)]
    pub eval_seed: u64,
    #[serde(default = "default_coverage_mc")]
    pub coverage_mc: usize,
    /// Rounds for the online command.
    #[serde(default)]
    pub horizon: Option<usize>,
    #[serde(default)]
    pub refresh: LcbRefresh,
    /// Fill the `ms` column with wall-clock times (makes output
    /// non-reproducible).
    #[serde(default)]
    pub timing: bool,
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        match &self.base_dir {
            Some(base) if p.is_relative() => base.join(p),
            _ => p.to_path_buf(),
        }
    }

    pub fn instance_spec(&self) -> Result<InstanceSpec> {
        match (&self.env, &self.env_file) {
            (Some(spec), None) => Ok(spec.clone()),
            (None, Some(file)) => {
                let path = self.resolve(file);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
                InstanceSpec::from_json(&text).map_err(|e| HarnessError::Config(e.to_string()))
            }
            _ => Err(HarnessError::Config("exactly one of `env` and `env_file` is required".into())),
        }
    }

    pub fn environment(&self) -> Result<Environment> {
        self.instance_spec()?
            .build()
            .map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn env_label(&self, env: &Environment) -> String {
        self.name.clone().unwrap_or_else(|| env.kind().to_string())
    }

    pub fn output_path(&self) -> Option<PathBuf> {
        let out = self.output.as_ref()?;
        if out.is_relative() {
            if let Some(dir) = std::env::var_os(OUTPUT_DIR_VAR) {
                return Some(PathBuf::from(dir).join(out));
            }
        }
        Some(self.resolve(out))
    }

    fn check_common(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(HarnessError::Config(format!("delta must lie in (0,1), got {}", self.delta)));
        }
        Ok(())
    }

    fn check_grid(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(HarnessError::Config("n_values must not be empty".into()));
        }
        if self.n_values.contains(&0) || self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HarnessError::Config("n_values must be positive and strictly increasing".into()));
        }
        Ok(())
    }

    /// Validation for the `run` command; returns the built environment.
    pub fn validate_run(&self) -> Result<Environment> {
        self.check_common()?;
        self.check_grid()?;
        let env = self.environment()?;
        if self.algorithms.is_empty() {
            return Err(HarnessError::Config("no algorithms listed".into()));
        }
        for a in &self.algorithms {
            a.check(env.kind()).map_err(|e| HarnessError::Config(e.to_string()))?;
        }
        Ok(env)
    }

    pub fn validate_coverage(&self) -> Result<Environment> {
        self.check_common()?;
        self.check_grid()?;
        self.environment()
    }

    pub fn validate_online(&self) -> Result<(Environment, usize)> {
        self.check_common()?;
        let env = self.environment()?;
        if !matches!(env, Environment::Cache { .. }) {
            return Err(HarnessError::Config("the online command needs a cache environment".into()));
        }
        match self.horizon {
            Some(t) if t > 0 => Ok((env, t)),
            _ => Err(HarnessError::Config("online runs need a positive `horizon`".into())),
        }
    }
}
