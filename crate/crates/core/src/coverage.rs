//! Triggering probabilities and the data-coverage coefficients built from
//! them.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::action::{Action, ArmId};
use crate::error::Result;
use crate::seed::{derive_seed, rng_from_seed};

/// What an environment must expose so that coverage can be measured.
///
/// `Collection` is the experimenter's data-collection distribution over
/// actions. The `exact_*` hooks return closed forms when the environment has
/// them; otherwise coverage falls back to Monte Carlo through the samplers.
pub trait CoverageModel {
    type Collection;

    fn arm_count(&self) -> usize;

    fn check_action(&self, action: &Action) -> Result<()>;

    /// Draws one set of triggered arms from playing `action`.
    fn sample_triggered(&self, action: &Action, rng: &mut dyn RngCore) -> Vec<ArmId>;

    /// Draws one action from the collection distribution. Samplers that can
    /// fail (rejection caps) report through the error.
    fn sample_collection(&self, dist: &Self::Collection, rng: &mut dyn RngCore) -> Result<Action>;

    fn exact_triggering(&self, _action: &Action) -> Option<Vec<f64>> {
        None
    }

    fn exact_collection_triggering(&self, _dist: &Self::Collection) -> Option<Vec<f64>> {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    /// Triggering probability of each arm under the optimal action.
    pub p_opt: Vec<f64>,
    /// Triggering probability of each arm under the collection distribution.
    pub p_data: Vec<f64>,
    /// Monte Carlo standard errors, absent when the closed form was used.
    pub p_opt_se: Option<Vec<f64>>,
    pub p_data_se: Option<Vec<f64>>,
    pub c_inf: f64,
    /// Arm attaining `c_inf` (lowest id on ties).
    pub c_inf_arm: Option<usize>,
    pub c_one: f64,
    pub k_bar: f64,
    pub k_bar_2: f64,
    /// Set when some arm has `p_opt > 0` but `p_data == 0`.
    pub unbounded: bool,
    pub mc_samples: usize,
}

impl CoverageReport {
    /// Assembles a report from the two probability vectors.
    pub fn from_probabilities(p_opt: Vec<f64>, p_data: Vec<f64>) -> Self {
        assert_eq!(p_opt.len(), p_data.len());
        let mut c_inf = 0.0f64;
        let mut c_inf_arm = None;
        let mut c_one = 0.0;
        let mut unbounded = false;
        for (i, (&po, &pd)) in p_opt.iter().zip(&p_data).enumerate() {
            if po <= 0.0 {
                continue;
            }
            let ratio = if pd > 0.0 {
                po / pd
            } else {
                unbounded = true;
                f64::INFINITY
            };
            c_one += ratio;
            if c_inf_arm.is_none() || ratio > c_inf {
                c_inf = ratio;
                c_inf_arm = Some(i);
            }
        }
        let k_bar = p_opt.iter().sum();
        let k_bar_2 = p_opt.iter().map(|p| p.max(0.0).sqrt()).sum();
        CoverageReport {
            p_opt,
            p_data,
            p_opt_se: None,
            p_data_se: None,
            c_inf,
            c_inf_arm,
            c_one,
            k_bar,
            k_bar_2,
            unbounded,
            mc_samples: 0,
        }
    }

    /// Smallest data triggering probability among arms with `p_opt > 0`.
    pub fn p_star(&self) -> Option<f64> {
        self.p_opt
            .iter()
            .zip(&self.p_data)
            .filter(|(&po, _)| po > 0.0)
            .map(|(_, &pd)| pd)
            .reduce(f64::min)
    }
}

/// Monte Carlo estimate of per-arm triggering frequency with standard errors.
pub fn estimate_triggering<F>(m: usize, samples: usize, mut draw: F) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: FnMut() -> Result<Vec<ArmId>>,
{
    let mut hits = vec![0u64; m];
    for _ in 0..samples {
        for a in draw()? {
            hits[a.0] += 1;
        }
    }
    let s = samples.max(1) as f64;
    let p: Vec<f64> = hits.iter().map(|&h| h as f64 / s).collect();
    let se = p.iter().map(|&q| (q * (1.0 - q) / s).sqrt()).collect();
    Ok((p, se))
}

/// Computes `p_opt`, `p_data` and the coverage coefficients.
///
/// Closed forms are used when the environment provides them; otherwise each
/// side is estimated from `mc_samples` draws with independent streams derived
/// from `seed`.
pub fn coverage_report<E: CoverageModel>(
    env: &E,
    data_dist: &E::Collection,
    s_star: &Action,
    mc_samples: usize,
    seed: u64,
) -> Result<CoverageReport> {
    env.check_action(s_star)?;
    let m = env.arm_count();

    let (p_opt, p_opt_se) = match env.exact_triggering(s_star) {
        Some(p) => (p, None),
        None => {
            let mut rng = rng_from_seed(derive_seed(seed, &[0]));
            let (p, se) = estimate_triggering(m, mc_samples, || Ok(env.sample_triggered(s_star, &mut rng)))?;
            (p, Some(se))
        }
    };
    let (p_data, p_data_se) = match env.exact_collection_triggering(data_dist) {
        Some(p) => (p, None),
        None => {
            let mut rng = rng_from_seed(derive_seed(seed, &[1]));
            let (p, se) = estimate_triggering(m, mc_samples, || {
                let a = env.sample_collection(data_dist, &mut rng)?;
                Ok(env.sample_triggered(&a, &mut rng))
            })?;
            (p, Some(se))
        }
    };

    let used_mc = p_opt_se.is_some() || p_data_se.is_some();
    let mut report = CoverageReport::from_probabilities(p_opt, p_data);
    report.p_opt_se = p_opt_se;
    report.p_data_se = p_data_se;
    report.mc_samples = if used_mc { mc_samples } else { 0 };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_probabilities_give_unit_coverage() {
        let r = CoverageReport::from_probabilities(vec![1.0, 0.5, 0.0], vec![1.0, 0.5, 0.3]);
        assert_eq!(r.c_inf, 1.0);
        assert_eq!(r.c_inf_arm, Some(0));
        assert_eq!(r.c_one, 2.0);
        assert_eq!(r.k_bar, 1.5);
        assert!((r.k_bar_2 - (1.0 + 0.5f64.sqrt())).abs() < 1e-15);
        assert!(!r.unbounded);
    }

    #[test]
    fn zero_p_opt_excluded_and_zero_p_data_flagged() {
        let r = CoverageReport::from_probabilities(vec![0.0, 0.2], vec![0.0, 0.1]);
        assert_eq!(r.c_inf, 2.0);
        assert_eq!(r.c_inf_arm, Some(1));
        let r = CoverageReport::from_probabilities(vec![0.5, 0.2], vec![0.0, 0.1]);
        assert!(r.unbounded);
        assert_eq!(r.c_inf, f64::INFINITY);
    }

    #[test]
    fn c_one_bounded_by_m_times_c_inf() {
        let r = CoverageReport::from_probabilities(vec![0.9, 0.4, 0.1], vec![0.3, 0.5, 0.05]);
        assert!(r.c_one <= 3.0 * r.c_inf);
    }
}
