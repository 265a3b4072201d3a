//! Coverage coefficients of an instance and the gap bounds they imply.

use cmabt_core::{coverage_report, CoverageReport, GapBounds, SmoothnessSpec};
use cmabt_envs::Environment;
use cmabt_oracles::{DEFAULT_MC_PER_EVAL, GREEDY_RATIO};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::gap::{optimum, EvalSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageSummary {
    pub env: String,
    pub report: CoverageReport,
    pub smoothness: SmoothnessSpec,
    pub bounds: Vec<GapBounds>,
    /// Cascading with a uniform sampler: `mu_1 m / mu_K`.
    pub c_one_uniform_bound: Option<f64>,
    /// Cascading: `C_1` with `p_data` replaced by its position lower bound.
    pub c_one_from_lower_bound: Option<f64>,
}

/// `B1` is the number of nodes for influence maximisation and 1 otherwise;
/// the IM oracle is greedy, so its ratio enters as `alpha`.
pub fn smoothness(env: &Environment) -> Result<SmoothnessSpec> {
    Ok(match env {
        Environment::Ic { instance, .. } => SmoothnessSpec::new(instance.node_count() as f64, GREEDY_RATIO)?,
        _ => SmoothnessSpec::unit(),
    })
}

pub fn report(env: &Environment, s_star: &cmabt_core::Action, mc: usize, seed: u64) -> Result<CoverageReport> {
    Ok(match env {
        Environment::Cascading { instance, sampler } => coverage_report(instance, sampler, s_star, mc, seed)?,
        Environment::Cache { instance, collection } => coverage_report(instance, collection, s_star, mc, seed)?,
        Environment::Ic { instance, .. } => {
            coverage_report(instance, &instance.seed_probs().to_vec(), s_star, mc, seed)?
        }
        Environment::KPath { instance } => {
            coverage_report(instance, &instance.collection_probs().to_vec(), s_star, mc, seed)?
        }
    })
}

pub fn coverage_for(cfg: &ExperimentConfig) -> Result<CoverageSummary> {
    let env = cfg.validate_coverage()?;
    let eval = EvalSpec {
        mc: cfg.eval_mc,
        seed: cfg.eval_seed,
    };
    let opt = optimum(&env, cfg.optimum, cfg.mc_per_eval.unwrap_or(DEFAULT_MC_PER_EVAL), eval)?;
    let rep = report(&env, &opt.action, cfg.coverage_mc, cfg.base_seed)?;
    let s = smoothness(&env)?;
    let bounds = cfg
        .n_values
        .iter()
        .map(|&n| GapBounds::evaluate(&rep, s, n, cfg.delta))
        .collect();
    let (uniform, lower) = match &env {
        Environment::Cascading { instance, sampler } => {
            let lb = sampler.triggering_lower_bound(instance);
            let c1: f64 = rep
                .p_opt
                .iter()
                .zip(&lb)
                .filter(|(&po, _)| po > 0.0)
                .map(|(&po, &l)| if l > 0.0 { po / l } else { f64::INFINITY })
                .sum();
            let uniform = matches!(sampler, cmabt_envs::PositionSampler::Uniform).then(|| instance.uniform_c_one_bound());
            (uniform, Some(c1))
        }
        _ => (None, None),
    };
    Ok(CoverageSummary {
        env: cfg.env_label(&env),
        report: rep,
        smoothness: s,
        bounds,
        c_one_uniform_bound: uniform,
        c_one_from_lower_bound: lower,
    })
}

impl CoverageSummary {
    /// Human-readable table.
    pub fn render(&self) -> String {
        let r = &self.report;
        let mut out = format!(
            "env {}\nC_inf {} (arm {})\nC_1 {}\nK_bar {}\nK_bar_2 {}\n",
            self.env,
            r.c_inf,
            r.c_inf_arm.map(|a| a.to_string()).unwrap_or_else(|| "-".into()),
            r.c_one,
            r.k_bar,
            r.k_bar_2
        );
        if r.unbounded {
            out.push_str("warning: some arm used by the optimum is never triggered by the data\n");
        }
        if r.mc_samples > 0 {
            out.push_str(&format!("monte carlo samples {}\n", r.mc_samples));
        }
        if let Some(b) = self.c_one_uniform_bound {
            out.push_str(&format!("C_1 uniform bound {b}\n"));
        }
        if let Some(b) = self.c_one_from_lower_bound {
            out.push_str(&format!("C_1 from position lower bound {b}\n"));
        }
        out.push_str(&format!("B1 {} alpha {}\nn,bound_inf,bound_one,n_sufficient\n", self.smoothness.b1, self.smoothness.alpha));
        for b in &self.bounds {
            out.push_str(&format!("{},{},{},{}\n", b.n, b.inf_norm, b.one_norm, b.n_sufficient));
        }
        out
    }
}
