//! Replicated offline experiments over a grid of dataset sizes.
//!
//! Every `(n, trial)` cell draws one dataset from the seed
//! `derive_seed(base_seed, [n, trial])` and runs every listed algorithm on
//! it. Cells run in parallel; rows are sorted afterwards so output bytes do
//! not depend on scheduling.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use cmabt_algos::{run_offline, AlgorithmId, RunParams};
use cmabt_core::derive_seed;
use cmabt_envs::Environment;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::gap::{evaluate_gap, optimum, EvalSpec, Optimum};

pub const CSV_HEADER: [&str; 7] = ["env", "alg", "n", "trial", "seed", "gap", "ms"];

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub env: String,
    pub alg: AlgorithmId,
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub gap: f64,
    pub ms: Option<f64>,
    /// Hash of the dataset the algorithm saw; shared by all rows of a cell.
    pub fingerprint: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryEntry {
    pub env: String,
    pub alg: String,
    pub n: usize,
    pub trials: usize,
    pub mean_gap: f64,
    /// Sample standard deviation (0 for a single trial).
    pub std_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub name: String,
    pub harness_version: String,
    pub base_seed: u64,
    pub delta: f64,
    pub trials: usize,
    pub n_values: Vec<usize>,
    pub optimum: Optimum,
    /// Present when the reference optimum is approximate.
    pub optimum_caveat: Option<String>,
    pub entries: Vec<SummaryEntry>,
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub rows: Vec<ResultRow>,
    pub summary: Summary,
}

pub fn cell_seed(base_seed: u64, n: usize, trial: usize) -> u64 {
    derive_seed(base_seed, &[n as u64, trial as u64])
}

/// Seed for randomness inside the algorithms of a cell, kept apart from the
/// data stream.
pub fn algorithm_seed(cell_seed: u64) -> u64 {
    derive_seed(cell_seed, &[1])
}

fn run_cell(
    cfg: &ExperimentConfig,
    env: &Environment,
    label: &str,
    opt: &Optimum,
    n: usize,
    trial: usize,
) -> Result<Vec<ResultRow>> {
    let seed = cell_seed(cfg.base_seed, n, trial);
    let data = env.generate(n, seed)?;
    let fingerprint = data.fingerprint();
    let params = RunParams {
        delta: cfg.delta,
        mc_per_eval: cfg.mc_per_eval,
        seed: algorithm_seed(seed),
    };
    let eval = EvalSpec {
        mc: cfg.eval_mc,
        seed: cfg.eval_seed,
    };
    cfg.algorithms
        .iter()
        .map(|&alg| {
            let start = Instant::now();
            let out = run_offline(alg, env, &data, &params)?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            let gap = evaluate_gap(env, &out.action, opt, eval)?;
            Ok(ResultRow {
                env: label.to_string(),
                alg,
                n,
                trial,
                seed,
                gap,
                ms: cfg.timing.then_some(ms),
                fingerprint,
            })
        })
        .collect()
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryEntry> {
    let mut groups: BTreeMap<(String, String, usize), Vec<f64>> = BTreeMap::new();
    for r in rows {
        groups
            .entry((r.env.clone(), r.alg.to_string(), r.n))
            .or_default()
            .push(r.gap);
    }
    groups
        .into_iter()
        .map(|((env, alg, n), gaps)| {
            let (mean_gap, std_gap) = mean_std(&gaps);
            SummaryEntry {
                env,
                alg,
                n,
                trials: gaps.len(),
                mean_gap,
                std_gap,
            }
        })
        .collect()
}

/// Validates `cfg`, then runs the full grid.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Experiment> {
    let env = cfg.validate_run()?;
    let label = cfg.env_label(&env);
    let eval = EvalSpec {
        mc: cfg.eval_mc,
        seed: cfg.eval_seed,
    };
    let mc_per_eval = cfg.mc_per_eval.unwrap_or(cmabt_oracles::DEFAULT_MC_PER_EVAL);
    let opt = optimum(&env, cfg.optimum, mc_per_eval, eval)?;

    let cells: Vec<(usize, usize)> = cfg
        .n_values
        .iter()
        .flat_map(|&n| (0..cfg.trials).map(move |t| (n, t)))
        .collect();
    let nested: Vec<Vec<ResultRow>> = cells
        .par_iter()
        .map(|&(n, t)| run_cell(cfg, &env, &label, &opt, n, t))
        .collect::<Result<_>>()?;
    let mut rows: Vec<ResultRow> = nested.into_iter().flatten().collect();
    rows.sort_by(|a, b| {
        (a.env.as_str(), a.alg.as_str(), a.n, a.trial).cmp(&(b.env.as_str(), b.alg.as_str(), b.n, b.trial))
    });

    let optimum_caveat = opt.approximate.then(|| {
        format!(
            "reference optimum is a greedy seed set (guarantee {:.4} of the true optimum); gaps may be negative",
            opt.ratio
        )
    });
    let summary = Summary {
        name: label,
        harness_version: env!("CARGO_PKG_VERSION").to_string(),
        base_seed: cfg.base_seed,
        delta: cfg.delta,
        trials: cfg.trials,
        n_values: cfg.n_values.clone(),
        optimum: opt,
        optimum_caveat,
        entries: summarize(&rows),
    };
    Ok(Experiment { rows, summary })
}

pub fn write_csv<W: Write>(rows: &[ResultRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let io = |e: csv::Error| HarnessError::Runtime(e.to_string());
    out.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        out.write_record([
            r.env.clone(),
            r.alg.to_string(),
            r.n.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.gap.to_string(),
            r.ms.map(|x| x.to_string()).unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    out.flush()?;
    Ok(())
}

pub fn csv_string(rows: &[ResultRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

/// Path of the JSON summary written next to `csv_path`.
pub fn summary_path(csv_path: &std::path::Path) -> std::path::PathBuf {
    csv_path.with_extension("summary.json")
}

/// Writes the CSV and its JSON summary, creating parent directories.
pub fn write_outputs(exp: &Experiment, csv_path: &std::path::Path) -> Result<()> {
    if let Some(dir) = csv_path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(csv_path, csv_string(&exp.rows))?;
    let json = serde_json::to_string_pretty(&exp.summary).map_err(|e| HarnessError::Runtime(e.to_string()))?;
    std::fs::write(summary_path(csv_path), json + "\n")?;
    Ok(())
}
