//! The stochastic k-path problem: `m/k` disjoint paths of `k` arms each,
//! every arm on a path sharing a single coin.

use std::collections::BTreeMap;

use cmabt_core::{rng_from_seed, Action, ActionKind, ArmId, CoreError, CoverageModel, Dataset, OfflineRecord};
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{EnvError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KPathInstance {
    m: usize,
    k: usize,
    path_means: Vec<f64>,
    collection_probs: Vec<f64>,
}

impl KPathInstance {
    pub fn new(m: usize, k: usize, path_means: Vec<f64>, collection_probs: Vec<f64>) -> Result<Self> {
        if k == 0 || m == 0 || !m.is_multiple_of(k) {
            return Err(EnvError::InvalidInstance(format!("m = {m} must be a positive multiple of k = {k}")));
        }
        let paths = m / k;
        if path_means.len() != paths || collection_probs.len() != paths {
            return Err(EnvError::InvalidInstance(format!(
                "need {paths} path means and collection probabilities"
            )));
        }
        if path_means.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(EnvError::InvalidInstance("path means must lie in [0,1]".into()));
        }
        let total: f64 = collection_probs.iter().sum();
        if collection_probs.iter().any(|x| !(*x >= 0.0)) || (total - 1.0).abs() > 1e-9 {
            return Err(EnvError::InvalidInstance(format!(
                "collection probabilities must be non-negative and sum to 1, sum is {total}"
            )));
        }
        Ok(KPathInstance {
            m,
            k,
            path_means,
            collection_probs,
        })
    }

    /// Two-point instance with means `(1/2, 1/2 - gap, 0, ...)` whose
    /// collection distribution `(1/c, 1 - 1/c, 0, ...)` gives `C_inf = c`.
    pub fn hard_instance(m: usize, k: usize, c_inf: f64, gap: f64) -> Result<Self> {
        let paths = if k > 0 { m / k } else { 0 };
        if paths < 2 || !(c_inf >= 1.0) || !(0.0..=0.5).contains(&gap) {
            return Err(EnvError::InvalidInstance(
                "need at least two paths, c_inf >= 1 and gap in [0, 1/2]".into(),
            ));
        }
        let mut means = vec![0.0; paths];
        means[0] = 0.5;
        means[1] = 0.5 - gap;
        let mut probs = vec![0.0; paths];
        probs[0] = 1.0 / c_inf;
        probs[1] = 1.0 - 1.0 / c_inf;
        Self::new(m, k, means, probs)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn path_count(&self) -> usize {
        self.m / self.k
    }

    pub fn path_means(&self) -> &[f64] {
        &self.path_means
    }

    pub fn collection_probs(&self) -> &[f64] {
        &self.collection_probs
    }

    /// Arms `jk .. (j+1)k`.
    pub fn path_action(&self, j: usize) -> Action {
        Action::set(j * self.k..(j + 1) * self.k).expect("distinct arms")
    }

    /// Per-arm means: each arm carries its path's mean.
    pub fn arm_means(&self) -> Vec<f64> {
        (0..self.m).map(|i| self.path_means[i / self.k]).collect()
    }

    /// Index of the path `action` equals.
    pub fn path_of(&self, action: &Action) -> Result<usize> {
        let idx = action.indices();
        let j = idx.first().map_or(usize::MAX, |&i| i / self.k);
        if j >= self.path_count() || action.to_set() != self.path_action(j) {
            return Err(EnvError::InfeasibleAction(format!("{action} is not a path")));
        }
        Ok(j)
    }

    /// Sum of arm means on the path, `k mu_j`.
    pub fn reward_exact(&self, action: &Action) -> Result<f64> {
        let j = self.path_of(action)?;
        Ok(self.k as f64 * self.path_means[j])
    }

    /// Path with the largest mean, lowest index on ties.
    pub fn optimal(&self) -> Action {
        let mut best = 0;
        for j in 1..self.path_count() {
            if self.path_means[j] > self.path_means[best] {
                best = j;
            }
        }
        self.path_action(best)
    }

    fn play(&self, j: usize, rng: &mut dyn RngCore) -> (Vec<ArmId>, BTreeMap<ArmId, f64>) {
        let x = if rng.gen::<f64>() < self.path_means[j] { 1.0 } else { 0.0 };
        let arms: Vec<ArmId> = (j * self.k..(j + 1) * self.k).map(ArmId).collect();
        let outcomes = arms.iter().map(|&a| (a, x)).collect();
        (arms, outcomes)
    }
}

/// `n` records: path from the collection distribution, one shared coin.
pub fn kpath_generate(inst: &KPathInstance, n: usize, seed: u64) -> Result<Dataset> {
    let mut rng = rng_from_seed(seed);
    let paths = WeightedIndex::new(&inst.collection_probs).map_err(|e| EnvError::Sampler(e.to_string()))?;
    let records = (0..n)
        .map(|_| {
            let j = paths.sample(&mut rng);
            let (triggered, outcomes) = inst.play(j, &mut rng);
            OfflineRecord::new(inst.path_action(j), triggered, outcomes)
        })
        .collect();
    Ok(Dataset::new(inst.m, records)?)
}

/// Semi-bandit feedback: every arm of the played path is observed.
/// Coverage is estimated by sampling only.
impl CoverageModel for KPathInstance {
    /// Distribution over paths.
    type Collection = Vec<f64>;

    fn arm_count(&self) -> usize {
        self.m
    }

    fn check_action(&self, action: &Action) -> cmabt_core::Result<()> {
        if action.kind() != ActionKind::Set {
            return Err(CoreError::InfeasibleAction("a path is a set of arms".into()));
        }
        self.path_of(action)?;
        Ok(())
    }

    fn sample_triggered(&self, action: &Action, _rng: &mut dyn RngCore) -> Vec<ArmId> {
        action.members().to_vec()
    }

    fn sample_collection(&self, dist: &Vec<f64>, rng: &mut dyn RngCore) -> cmabt_core::Result<Action> {
        let w = WeightedIndex::new(dist).map_err(|e| CoreError::InvalidParams(e.to_string()))?;
        Ok(self.path_action(w.sample(rng)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cmabt_core::{aggregate, coverage_report};

    #[test]
    fn outcomes_within_record_agree() {
        let i = KPathInstance::new(6, 2, vec![0.5, 0.3, 0.8], vec![0.2, 0.3, 0.5]).unwrap();
        let d = kpath_generate(&i, 500, 1).unwrap();
        for r in d.records() {
            let first = r.outcomes.values().next().copied().unwrap();
            assert_eq!(r.triggered.len(), 2);
            assert!(r.outcomes.values().all(|&x| x == first));
        }
    }

    #[test]
    fn first_path_observation_rate() {
        let c = 4.0;
        let n = 20_000;
        let i = KPathInstance::hard_instance(8, 2, c, 0.1).unwrap();
        let d = kpath_generate(&i, n, 2).unwrap();
        let s = aggregate(&d);
        let p = 1.0 / c;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((s.count(0) as f64 - n as f64 / c).abs() <= 3.0 * sigma);
        assert_eq!(s.count(4), 0);
    }

    #[test]
    fn path_mean_concentrates() {
        let i = KPathInstance::new(4, 2, vec![0.5, 0.25], vec![0.5, 0.5]).unwrap();
        let s = aggregate(&kpath_generate(&i, 10_000, 3).unwrap());
        let n1 = s.count(0) as f64;
        assert!((s.mean(0).unwrap() - 0.5).abs() <= 3.0 * (0.25 / n1).sqrt());
    }

    #[test]
    fn reward_and_optimum() {
        let i = KPathInstance::new(4, 2, vec![0.5, 0.25], vec![0.5, 0.5]).unwrap();
        assert_eq!(i.optimal(), Action::set([0, 1]).unwrap());
        assert_eq!(i.reward_exact(&Action::set([2, 3]).unwrap()).unwrap(), 0.5);
        assert!(i.reward_exact(&Action::set([1, 2]).unwrap()).is_err());
        assert!(KPathInstance::new(5, 2, vec![0.5, 0.5], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn designed_coverage_recovered() {
        for c in [2.0, 4.0, 8.0] {
            let i = KPathInstance::hard_instance(10, 2, c, 0.1).unwrap();
            let r = coverage_report(&i, &i.collection_probs().to_vec(), &i.optimal(), 100_000, 7).unwrap();
            let se = r.p_data_se.as_ref().unwrap()[0];
            let tol = 3.0 * c * c * se;
            assert!((r.c_inf - c).abs() <= tol, "designed {c}, got {}", r.c_inf);
        }
    }
}
