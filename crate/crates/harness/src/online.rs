//! Online runs of the streaming cache learner.

use std::io::Write;

use cmabt_algos::{cucb_llm_s, OnlineRun};
use cmabt_core::derive_seed;
use cmabt_envs::Environment;
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

/// One run per trial, seeded `derive_seed(base_seed, [trial])`.
pub fn run_online(cfg: &ExperimentConfig) -> Result<Vec<OnlineRun>> {
    let (env, horizon) = cfg.validate_online()?;
    let Environment::Cache { instance, .. } = &env else {
        unreachable!("validated as a cache environment")
    };
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| Ok(cucb_llm_s(instance, horizon, derive_seed(cfg.base_seed, &[t as u64]), cfg.refresh)?))
        .collect()
}

/// CSV with columns `trial,t,regret,cumulative`; `t` counts from 1.
pub fn write_online_csv<W: Write>(runs: &[OnlineRun], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let io = |e: csv::Error| HarnessError::Runtime(e.to_string());
    out.write_record(["trial", "t", "regret", "cumulative"]).map_err(io)?;
    for (trial, run) in runs.iter().enumerate() {
        for (i, (r, c)) in run.regret.iter().zip(&run.cumulative).enumerate() {
            out.write_record([trial.to_string(), (i + 1).to_string(), r.to_string(), c.to_string()])
                .map_err(io)?;
        }
    }
    out.flush()?;
    Ok(())
}
