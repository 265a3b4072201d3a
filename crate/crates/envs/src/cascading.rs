//! Cascading click model: the user scans a ranked list top-down and stops at
//! the first item they purchase.

use std::collections::BTreeMap;

use cmabt_core::{rng_from_seed, Action, ActionKind, ArmId, CoreError, CoverageModel, Dataset, OfflineRecord};
use cmabt_oracles::{top_k_list, Direction};
use rand::distributions::{Distribution, Uniform};
use rand::seq::index;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{EnvError, Result};

/// Rejections allowed per list before the positional sampler gives up.
pub const REJECTION_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadingInstance {
    mu: Vec<f64>,
    k: usize,
}

impl CascadingInstance {
    pub fn new(mu: Vec<f64>, k: usize) -> Result<Self> {
        if k == 0 || k > mu.len() {
            return Err(EnvError::InvalidInstance(format!(
                "list length {k} must lie in 1..={}",
                mu.len()
            )));
        }
        if let Some(x) = mu.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(EnvError::InvalidInstance(format!("mean {x} outside [0,1]")));
        }
        Ok(CascadingInstance { mu, k })
    }

    /// `m` items with means drawn uniformly from `[0,1]`.
    pub fn synthetic(m: usize, k: usize, instance_seed: u64) -> Result<Self> {
        let mut rng = rng_from_seed(instance_seed);
        let mu = (0..m).map(|_| rng.gen::<f64>()).collect();
        Self::new(mu, k)
    }

    pub fn m(&self) -> usize {
        self.mu.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    fn check_list(&self, action: &Action) -> Result<()> {
        action.check_range(self.m())?;
        if action.len() > self.k {
            return Err(EnvError::InfeasibleAction(format!(
                "list of length {} exceeds K = {}",
                action.len(),
                self.k
            )));
        }
        Ok(())
    }

    /// `1 - prod (1 - mu_i)` over the listed items.
    pub fn reward_exact(&self, action: &Action) -> Result<f64> {
        self.check_list(action)?;
        Ok(reward_with(action, &self.mu))
    }

    /// Top-K items by mean, best first.
    pub fn optimal(&self) -> Action {
        top_k_list(&self.mu, self.k, Direction::Max).expect("K <= m by construction")
    }

    /// Plays `action` once: returns the examined prefix and its outcomes.
    pub fn play(&self, action: &Action, rng: &mut dyn RngCore) -> (Vec<ArmId>, BTreeMap<ArmId, f64>) {
        let mut triggered = Vec::new();
        let mut outcomes = BTreeMap::new();
        for &a in action.members() {
            let hit = rng.gen::<f64>() < self.mu[a.0];
            triggered.push(a);
            outcomes.insert(a, if hit { 1.0 } else { 0.0 });
            if hit {
                break;
            }
        }
        (triggered, outcomes)
    }

    /// Closed-form `C_1 <= mu_1 m / mu_K` for the uniform sampler, with
    /// `mu_1 >= ... >= mu_K` the top-K means.
    pub fn uniform_c_one_bound(&self) -> f64 {
        let top = self.optimal();
        let mu1 = self.mu[top.members()[0].0];
        let muk = self.mu[top.members()[self.k - 1].0];
        mu1 * self.m() as f64 / muk
    }
}

/// Cascade reward under arbitrary weights.
pub fn reward_with(action: &Action, w: &[f64]) -> f64 {
    1.0 - action.members().iter().map(|a| 1.0 - w[a.0]).product::<f64>()
}

/// Data-collection distribution over ranked lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum PositionSampler {
    /// Uniformly random list of K distinct items.
    #[default]
    Uniform,
    /// Position `j` draws item `i` with probability `q[i][j]`; column mass
    /// short of 1 and duplicate items are rejected.
    Positional { q: Vec<Vec<f64>> },
}

impl PositionSampler {
    pub fn validate(&self, inst: &CascadingInstance) -> Result<()> {
        let PositionSampler::Positional { q } = self else {
            return Ok(());
        };
        if q.len() != inst.m() || q.iter().any(|row| row.len() != inst.k()) {
            return Err(EnvError::InvalidInstance(format!(
                "positional matrix must be {}x{}",
                inst.m(),
                inst.k()
            )));
        }
        for j in 0..inst.k() {
            let col: f64 = q.iter().map(|r| r[j]).sum();
            if q.iter().any(|r| !(r[j] >= 0.0)) || col > 1.0 + 1e-9 {
                return Err(EnvError::InvalidInstance(format!(
                    "column {j} must be non-negative with mass at most 1, got {col}"
                )));
            }
        }
        Ok(())
    }

    pub fn sample(&self, inst: &CascadingInstance, rng: &mut dyn RngCore) -> Result<Action> {
        match self {
            PositionSampler::Uniform => {
                let idx = index::sample(rng, inst.m(), inst.k());
                Ok(Action::list(idx)?)
            }
            PositionSampler::Positional { q } => {
                let unit = Uniform::new(0.0, 1.0);
                let mut list = Vec::with_capacity(inst.k());
                'attempt: for _ in 0..=REJECTION_CAP {
                    list.clear();
                    for j in 0..inst.k() {
                        let mut u: f64 = unit.sample(rng);
                        let mut pick = None;
                        for (i, row) in q.iter().enumerate() {
                            if u < row[j] {
                                pick = Some(i);
                                break;
                            }
                            u -= row[j];
                        }
                        match pick {
                            Some(i) if !list.contains(&i) => list.push(i),
                            _ => continue 'attempt,
                        }
                    }
                    return Ok(Action::list(list.iter().copied())?);
                }
                Err(EnvError::Sampler(format!(
                    "no valid list after {REJECTION_CAP} rejections"
                )))
            }
        }
    }

    /// `q_ij` as a dense matrix (uniform gives `1/m` everywhere).
    pub fn position_probs(&self, inst: &CascadingInstance) -> Vec<Vec<f64>> {
        match self {
            PositionSampler::Uniform => vec![vec![1.0 / inst.m() as f64; inst.k()]; inst.m()],
            PositionSampler::Positional { q } => q.clone(),
        }
    }

    /// Lower bound `sum_j q_ij (1 - mu_1)^(j-1)` on each item's data
    /// triggering probability, `mu_1` the largest mean.
    pub fn triggering_lower_bound(&self, inst: &CascadingInstance) -> Vec<f64> {
        let mu1 = inst.mu.iter().copied().fold(0.0, f64::max);
        self.position_probs(inst)
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(j, qij)| qij * (1.0 - mu1).powi(j as i32))
                    .sum()
            })
            .collect()
    }
}

/// `n` offline records: list from `sampler`, Bernoulli purchases, examined
/// prefix revealed.
pub fn cascade_generate(inst: &CascadingInstance, sampler: &PositionSampler, n: usize, seed: u64) -> Result<Dataset> {
    sampler.validate(inst)?;
    let mut rng = rng_from_seed(seed);
    let mut records = Vec::with_capacity(n);
    for _ in 0..n {
        let action = sampler.sample(inst, &mut rng)?;
        let (triggered, outcomes) = inst.play(&action, &mut rng);
        records.push(OfflineRecord::new(action, triggered, outcomes));
    }
    Ok(Dataset::new(inst.m(), records)?)
}

/// Elementary symmetric polynomials `e_0..=e_d` of `xs`.
fn elementary_symmetric(xs: impl Iterator<Item = f64>, d: usize) -> Vec<f64> {
    let mut e = vec![0.0; d + 1];
    e[0] = 1.0;
    for x in xs {
        for j in (1..=d).rev() {
            e[j] += x * e[j - 1];
        }
    }
    e
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl CoverageModel for CascadingInstance {
    type Collection = PositionSampler;

    fn arm_count(&self) -> usize {
        self.m()
    }

    fn check_action(&self, action: &Action) -> cmabt_core::Result<()> {
        if action.kind() != ActionKind::OrderedList {
            return Err(CoreError::InfeasibleAction("cascading actions are ranked lists".into()));
        }
        Ok(self.check_list(action)?)
    }

    fn sample_triggered(&self, action: &Action, rng: &mut dyn RngCore) -> Vec<ArmId> {
        self.play(action, rng).0
    }

    fn sample_collection(&self, dist: &PositionSampler, rng: &mut dyn RngCore) -> cmabt_core::Result<Action> {
        Ok(dist.sample(self, rng)?)
    }

    /// Item at position `j` is examined iff every earlier item fails.
    fn exact_triggering(&self, action: &Action) -> Option<Vec<f64>> {
        let mut p = vec![0.0; self.m()];
        let mut reach = 1.0;
        for &a in action.members() {
            p[a.0] = reach;
            reach *= 1.0 - self.mu[a.0];
        }
        Some(p)
    }

    /// Uniform lists only: given item `i` at position `j`, the items ahead of
    /// it are a uniform `(j-1)`-subset of the rest.
    fn exact_collection_triggering(&self, dist: &PositionSampler) -> Option<Vec<f64>> {
        if *dist != PositionSampler::Uniform {
            return None;
        }
        let m = self.m();
        let k = self.k;
        let p = (0..m)
            .map(|i| {
                let others = (0..m).filter(|&l| l != i).map(|l| 1.0 - self.mu[l]);
                let e = elementary_symmetric(others, k - 1);
                (0..k).map(|j| e[j] / binom(m - 1, j)).sum::<f64>() / m as f64
            })
            .collect();
        Some(p)
    }
}
