//! Reference optima and suboptimality gaps.

use cmabt_core::Action;
use cmabt_envs::{EnvKind, Environment};
use cmabt_oracles::{greedy_im, SpreadEval, GREEDY_RATIO};
use serde::{Deserialize, Serialize};

use crate::config::OptimumMode;
use crate::error::{HarnessError, Result};

/// Largest graph the IM optimum is searched exhaustively on.
pub const IM_BRUTE_FORCE_NODES: usize = 12;
pub const IM_BRUTE_FORCE_SETS: u128 = 5_000;

/// How seed sets are scored: the same evaluator (and seed) is used for the
/// optimum and for every candidate, so their noise is paired.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalSpec {
    pub mc: usize,
    pub seed: u64,
}

impl EvalSpec {
    fn spread_eval(self) -> SpreadEval {
        SpreadEval::Auto {
            samples: self.mc,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub action: Action,
    /// Reward, or cost for the cache environment.
    pub value: f64,
    /// Set when the reference is itself an approximation.
    pub approximate: bool,
    /// Approximation guarantee of the reference (1 when exact).
    pub ratio: f64,
}

fn binom(n: usize, k: usize) -> u128 {
    (0..k.min(n)).fold(1u128, |a, i| a * (n - i) as u128 / (i as u128 + 1))
}

/// Value of `action`: reward (to maximise) or, for caches, expected cost.
pub fn value_of(env: &Environment, action: &Action, eval: EvalSpec) -> Result<f64> {
    let infeasible = |e: String| HarnessError::Config(format!("infeasible action {action}: {e}"));
    match env {
        Environment::Cascading { instance, .. } => instance.reward_exact(action).map_err(|e| infeasible(e.to_string())),
        Environment::Cache { instance, .. } => instance.cost_exact(action).map_err(|e| infeasible(e.to_string())),
        Environment::KPath { instance } => instance.reward_exact(action).map_err(|e| infeasible(e.to_string())),
        Environment::Ic { instance, k } => {
            if action.len() > *k {
                return Err(infeasible(format!("more than {k} seeds")));
            }
            action
                .check_range(instance.node_count())
                .map_err(|e| infeasible(e.to_string()))?;
            Ok(eval.spread_eval().eval(instance.graph(), &action.indices())?)
        }
    }
}

pub fn optimum(env: &Environment, mode: OptimumMode, mc_per_eval: usize, eval: EvalSpec) -> Result<Optimum> {
    let exact = |action: Action| -> Result<Optimum> {
        let value = value_of(env, &action, eval)?;
        Ok(Optimum {
            action,
            value,
            approximate: false,
            ratio: 1.0,
        })
    };
    match env {
        Environment::Cascading { instance, .. } => exact(instance.optimal()),
        Environment::Cache { instance, .. } => exact(instance.optimal()),
        Environment::KPath { instance } => exact(instance.optimal()),
        Environment::Ic { instance, k } => {
            let v = instance.node_count();
            let small = v <= IM_BRUTE_FORCE_NODES && binom(v, *k) <= IM_BRUTE_FORCE_SETS;
            if mode == OptimumMode::BruteForce && small {
                let (action, value) = instance.brute_force_optimum(*k, eval.spread_eval())?;
                return Ok(Optimum {
                    action,
                    value,
                    approximate: false,
                    ratio: 1.0,
                });
            }
            let mc = match mode {
                OptimumMode::GreedyReference { mc: Some(mc) } => mc,
                _ => 10 * mc_per_eval,
            };
            let action = greedy_im(instance.graph(), *k, mc, eval.seed)?;
            let value = value_of(env, &action, eval)?;
            Ok(Optimum {
                action,
                value,
                approximate: true,
                ratio: GREEDY_RATIO,
            })
        }
    }
}

/// `r(S*) - r(S)` for rewards and `c(M) - c(M*)` for the cache; both are
/// non-negative against an exact optimum.
pub fn evaluate_gap(env: &Environment, action: &Action, opt: &Optimum, eval: EvalSpec) -> Result<f64> {
    let v = value_of(env, action, eval)?;
    Ok(match env.kind() {
        EnvKind::Cache => v - opt.value,
        _ => opt.value - v,
    })
}
