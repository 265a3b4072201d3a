//! Offline learners over generic semi-bandit datasets: the pessimistic
//! learner and its optimistic and greedy baselines.

use cmabt_core::{aggregate, lcb, ucb, ConfidenceParams, Dataset, RadiusForm};
use cmabt_oracles::Direction;

use crate::error::{AlgoError, Result};
use crate::oracle::{Oracle, TopKOracle};
use crate::output::AlgorithmOutput;

fn params(dataset: &Dataset, delta: f64, multiplier: f64) -> Result<ConfidenceParams> {
    if dataset.is_empty() {
        return Err(AlgoError::EmptyDataset);
    }
    Ok(ConfidenceParams::with_multiplier(delta, dataset.len(), dataset.m(), multiplier)?)
}

fn finish(action: cmabt_core::Action, stats: &cmabt_core::ArmStats, name: &str, w: &[f64]) -> AlgorithmOutput {
    let counts: Vec<f64> = stats.counts().iter().map(|&c| c as f64).collect();
    let objective = action.members().iter().map(|a| w[a.0]).sum();
    AlgorithmOutput::new(action)
        .with_vector(name, w)
        .with_vector("count", &counts)
        .with("objective", objective)
}

/// Aggregate, lower confidence bounds, oracle.
pub fn clcb(dataset: &Dataset, oracle: &dyn Oracle, delta: f64) -> Result<AlgorithmOutput> {
    clcb_with(dataset, oracle, delta, ConfidenceParams::GENERIC_MULTIPLIER)
}

/// [`clcb`] with an explicit multiplier inside the log term.
pub fn clcb_with(dataset: &Dataset, oracle: &dyn Oracle, delta: f64, multiplier: f64) -> Result<AlgorithmOutput> {
    let p = params(dataset, delta, multiplier)?;
    let stats = aggregate(dataset);
    let w = lcb(&stats, &p);
    let action = oracle.solve(&w)?;
    Ok(finish(action, &stats, "lcb", &w))
}

/// Ranked list of the `k` items with the largest lower bounds, best first.
pub fn clcb_cascade(dataset: &Dataset, k: usize, delta: f64) -> Result<AlgorithmOutput> {
    clcb_with(dataset, &TopKOracle::ranked(k), delta, ConfidenceParams::CASCADE_MULTIPLIER)
}

/// Optimistic baseline: oracle over Hoeffding upper bounds.
pub fn cucb_offline(dataset: &Dataset, oracle: &dyn Oracle, delta: f64) -> Result<AlgorithmOutput> {
    let p = params(dataset, delta, ConfidenceParams::GENERIC_MULTIPLIER)?;
    let stats = aggregate(dataset);
    let w = ucb(&stats, &p, RadiusForm::Hoeffding);
    let action = oracle.solve(&w)?;
    Ok(finish(action, &stats, "ucb", &w))
}

/// Greedy baseline: oracle over empirical means. Unobserved arms get 0 when
/// the oracle maximises and 1 when it minimises.
pub fn emp(dataset: &Dataset, oracle: &dyn Oracle, direction: Direction) -> Result<AlgorithmOutput> {
    if dataset.is_empty() {
        return Err(AlgoError::EmptyDataset);
    }
    let stats = aggregate(dataset);
    let default = match direction {
        Direction::Max => 0.0,
        Direction::Min => 1.0,
    };
    let w = stats.means_or(default);
    let action = oracle.solve(&w)?;
    Ok(finish(action, &stats, "mean", &w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use cmabt_core::{Action, ArmId, OfflineRecord};
    use cmabt_envs::{cascade_generate, CascadingInstance, PositionSampler};
    use cmabt_oracles::{brute_force_best, OrderedLists};

    fn single(arm: usize, x: f64) -> OfflineRecord {
        OfflineRecord::new(
            Action::set([arm]).unwrap(),
            vec![ArmId(arm)],
            [(ArmId(arm), x)].into_iter().collect(),
        )
    }

    // arm 0: 100 records, mean 0.6; arm 1: 2 records, mean 0.9
    fn two_arm() -> Dataset {
        let mut r: Vec<_> = (0..100).map(|i| single(0, if i < 60 { 1.0 } else { 0.0 })).collect();
        r.push(single(1, 1.0));
        r.push(single(1, 0.8));
        Dataset::new(2, r).unwrap()
    }

    // 30-digit evaluations at n = 102, m = 2, delta = 0.05, multiplier 4
    const LCB: [f64; 2] = [0.379_771_180_036_330_2, -0.657_252_920_090_222_4];
    const UCB: [f64; 2] = [0.820_228_819_963_669_8, 2.457_252_920_090_222_4];

    #[test]
    fn pessimism_picks_well_observed_arm() {
        let out = clcb(&two_arm(), &TopKOracle::set(1), 0.05).unwrap();
        assert_eq!(out.action, Action::set([0]).unwrap());
        let l = out.vector("lcb");
        assert!((l[0] - LCB[0]).abs() < 1e-12 && (l[1] - LCB[1]).abs() < 1e-12);
        assert_eq!(out.vector("count"), vec![100.0, 2.0]);
    }

    #[test]
    fn optimism_picks_rare_arm() {
        let out = cucb_offline(&two_arm(), &TopKOracle::set(1), 0.05).unwrap();
        assert_eq!(out.action, Action::set([1]).unwrap());
        let u = out.vector("ucb");
        assert!((u[0] - UCB[0]).abs() < 1e-12 && (u[1] - UCB[1]).abs() < 1e-12);
    }

    #[test]
    fn emp_follows_means() {
        let out = emp(&two_arm(), &TopKOracle::set(1), Direction::Max).unwrap();
        assert_eq!(out.action, Action::set([1]).unwrap());
        // unobserved arm 2 ranks as 0 under max and 1 under min
        let d = Dataset::new(3, two_arm().records().to_vec()).unwrap();
        let mx = emp(&d, &TopKOracle::set(1), Direction::Max).unwrap();
        assert_eq!(mx.vector("mean")[2], 0.0);
        let mn = TopKOracle {
            k: 1,
            direction: Direction::Min,
            ranked: false,
        };
        let out = emp(&d, &mn, Direction::Min).unwrap();
        assert_eq!(out.vector("mean")[2], 1.0);
        assert_eq!(out.action, Action::set([0]).unwrap());
    }

    #[test]
    fn unobserved_arms_fall_to_lowest_ids() {
        let r = OfflineRecord::new(Action::set([0]).unwrap(), vec![], Default::default());
        let d = Dataset::new(4, vec![r]).unwrap();
        let out = clcb(&d, &TopKOracle::set(2), 0.1).unwrap();
        assert_eq!(out.action, Action::set([0, 1]).unwrap());
        assert!(out.vector("lcb").iter().all(|&x| x == f64::NEG_INFINITY));
    }

    #[test]
    fn empty_dataset_rejected() {
        let d = Dataset::empty(2);
        assert!(matches!(clcb(&d, &TopKOracle::set(1), 0.1), Err(AlgoError::EmptyDataset)));
        assert!(matches!(emp(&d, &TopKOracle::set(1), Direction::Max), Err(AlgoError::EmptyDataset)));
    }

    #[test]
    fn large_uniform_data_recovers_best_list() {
        let inst = CascadingInstance::new(vec![0.9, 0.1, 0.5], 2).unwrap();
        let d = cascade_generate(&inst, &PositionSampler::Uniform, 20_000, 3).unwrap();
        let reward = |a: &Action, w: &[f64]| cmabt_envs::cascading::reward_with(a, w);
        let (best, _) = brute_force_best(reward, &OrderedLists { m: 3, len: 2 }, inst.mu()).unwrap();
        let generic = clcb(&d, &TopKOracle::ranked(2), 0.05).unwrap();
        let cascade = clcb_cascade(&d, 2, 0.05).unwrap();
        assert_eq!(generic.action, best);
        assert_eq!(cascade.action, best);
        assert_eq!(emp(&d, &TopKOracle::ranked(2), Direction::Max).unwrap().action, best);
        assert_eq!(cucb_offline(&d, &TopKOracle::ranked(2), 0.05).unwrap().action, best);
    }

    #[test]
    fn cascade_output_ranked_by_lcb() {
        let inst = CascadingInstance::synthetic(12, 4, 5).unwrap();
        let d = cascade_generate(&inst, &PositionSampler::Uniform, 500, 1).unwrap();
        let out = clcb_cascade(&d, 4, 0.1).unwrap();
        let l = out.vector("lcb");
        let ws: Vec<f64> = out.action.members().iter().map(|a| l[a.0]).collect();
        assert!(ws.windows(2).all(|p| p[0] >= p[1]));
        // the cascade variant uses the smaller log multiplier: bounds are tighter
        let g = clcb(&d, &TopKOracle::ranked(4), 0.1).unwrap().vector("lcb");
        assert!(l.iter().zip(&g).all(|(a, b)| a >= b));
    }
}
