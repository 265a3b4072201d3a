//! Online streaming cache: the next cache may only keep current entries and
//! the arriving query.

use cmabt_core::{rng_from_seed, Action};
use cmabt_envs::CacheInstance;
use rand::distributions::Distribution;
use serde::{Deserialize, Serialize};

use crate::error::{AlgoError, Result};

/// Which cost lower bounds a miss recomputes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LcbRefresh {
    /// Only the arriving query's bound moves; the cache then stays a top-k set
    /// of the stored scores after every round.
    #[default]
    Arriving,
    /// Every bound is recomputed with the current round index.
    AllQueries,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Hit,
    Fill,
    Replace { evicted: usize },
    Keep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamState {
    k: usize,
    refresh: LcbRefresh,
    cache: Vec<usize>,
    arrivals: Vec<u64>,
    misses: Vec<u64>,
    cost_sum: Vec<f64>,
    c_lower: Vec<f64>,
    t: u64,
}

impl StreamState {
    pub fn new(m: usize, k: usize, refresh: LcbRefresh) -> Result<Self> {
        if k > m {
            return Err(AlgoError::InvalidParams(format!("capacity {k} exceeds {m} queries")));
        }
        Ok(StreamState {
            k,
            refresh,
            cache: Vec::with_capacity(k),
            arrivals: vec![0; m],
            misses: vec![0; m],
            cost_sum: vec![0.0; m],
            c_lower: vec![0.0; m],
            t: 0,
        })
    }

    pub fn m(&self) -> usize {
        self.arrivals.len()
    }

    /// Rounds processed so far.
    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn cache(&self) -> Action {
        Action::set(self.cache.iter().copied()).expect("cache entries are distinct")
    }

    pub fn contains(&self, q: usize) -> bool {
        self.cache.contains(&q)
    }

    pub fn p_hat(&self) -> Vec<f64> {
        let t = self.t.max(1) as f64;
        self.arrivals.iter().map(|&a| a as f64 / t).collect()
    }

    pub fn c_lower(&self) -> &[f64] {
        &self.c_lower
    }

    /// `p_hat(q) * c_lower(q)`.
    pub fn scores(&self) -> Vec<f64> {
        self.p_hat().iter().zip(&self.c_lower).map(|(p, c)| p * c).collect()
    }

    // N(q) c_lower(q): same order as the score, free of the 1/t rounding
    fn key(&self, q: usize) -> f64 {
        self.arrivals[q] as f64 * self.c_lower[q]
    }

    fn lower_bound(&self, q: usize) -> f64 {
        let n = self.misses[q];
        if n == 0 {
            return 0.0;
        }
        let mean = self.cost_sum[q] / n as f64;
        (mean - (6.0 * (self.t as f64).ln() / n as f64).sqrt()).max(0.0)
    }

    /// Processes one arrival. `cost` is only called on a miss.
    pub fn step(&mut self, q: usize, cost: impl FnOnce() -> f64) -> StepKind {
        self.t += 1;
        self.arrivals[q] += 1;
        if self.contains(q) {
            return StepKind::Hit;
        }
        let c = cost();
        self.misses[q] += 1;
        self.cost_sum[q] += c;
        match self.refresh {
            LcbRefresh::Arriving => self.c_lower[q] = self.lower_bound(q),
            LcbRefresh::AllQueries => {
                for i in 0..self.m() {
                    self.c_lower[i] = self.lower_bound(i);
                }
            }
        }
        if self.cache.len() < self.k {
            self.cache.push(q);
            return StepKind::Fill;
        }
        // lowest id among the minimal entries
        let Some(pos) = (0..self.cache.len()).min_by(|&a, &b| {
            let (qa, qb) = (self.cache[a], self.cache[b]);
            self.key(qa).total_cmp(&self.key(qb)).then(qa.cmp(&qb))
        }) else {
            return StepKind::Keep;
        };
        let evicted = self.cache[pos];
        if self.key(evicted) <= self.key(q) {
            self.cache[pos] = q;
            StepKind::Replace { evicted }
        } else {
            StepKind::Keep
        }
    }

    /// Whether the cache maximises the summed score over sets of at most
    /// `k` queries, up to `tol` relative slack for ties.
    pub fn is_top_k(&self, tol: f64) -> bool {
        let s = self.scores();
        let mut sorted = s.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let best: f64 = sorted.iter().take(self.k).filter(|x| **x > 0.0).sum();
        let ours: f64 = self.cache.iter().map(|&q| s[q]).sum();
        ours >= best - tol * best.abs().max(1.0)
    }
}

/// Per-round record of an online run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnlineRun {
    /// `c(M_t) - c(M*)` for the cache in force at round `t`.
    pub regret: Vec<f64>,
    pub cumulative: Vec<f64>,
    pub steps: Vec<StepKind>,
    pub final_state: StreamState,
}

/// Runs the streaming learner for `horizon` rounds against `inst`, with
/// arrivals and costs drawn from `seed`.
pub fn cucb_llm_s(inst: &CacheInstance, horizon: usize, seed: u64, refresh: LcbRefresh) -> Result<OnlineRun> {
    cucb_llm_s_with(inst, horizon, seed, refresh, |_| ())
}

/// [`cucb_llm_s`] with a callback on the state after every round.
pub fn cucb_llm_s_with(
    inst: &CacheInstance,
    horizon: usize,
    seed: u64,
    refresh: LcbRefresh,
    mut observe: impl FnMut(&StreamState),
) -> Result<OnlineRun> {
    let mut rng = rng_from_seed(seed);
    let arrivals = inst.arrival_sampler();
    let best = inst.cost_exact(&inst.optimal())?;
    let mut state = StreamState::new(inst.m(), inst.k(), refresh)?;
    let mut regret = Vec::with_capacity(horizon);
    let mut cumulative = Vec::with_capacity(horizon);
    let mut steps = Vec::with_capacity(horizon);
    let mut total = 0.0;
    for _ in 0..horizon {
        let r = inst.cost_exact(&state.cache())? - best;
        total += r;
        regret.push(r);
        cumulative.push(total);
        let q = arrivals.sample(&mut rng);
        steps.push(state.step(q, || inst.sample_cost(q, &mut rng)));
        observe(&state);
    }
    Ok(OnlineRun {
        regret,
        cumulative,
        steps,
        final_state: state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use cmabt_envs::CostNoise;

    #[test]
    fn hit_leaves_everything_but_arrivals() {
        let mut s = StreamState::new(3, 1, LcbRefresh::Arriving).unwrap();
        assert_eq!(s.step(0, || 1.0), StepKind::Fill);
        let before = s.clone();
        assert_eq!(s.step(0, || panic!("no cost on a hit")), StepKind::Hit);
        assert_eq!(s.cache(), before.cache());
        assert_eq!(s.misses, before.misses);
        assert_eq!(s.c_lower, before.c_lower);
        assert_eq!(s.arrivals[0], 2);
    }

    #[test]
    fn first_distinct_misses_fill_in_order() {
        let mut s = StreamState::new(5, 3, LcbRefresh::Arriving).unwrap();
        for q in [4, 2, 4, 0] {
            s.step(q, || 0.5);
        }
        assert_eq!(s.cache, vec![4, 2, 0]);
    }

    #[test]
    fn replace_on_equal_score() {
        let mut s = StreamState::new(2, 1, LcbRefresh::Arriving).unwrap();
        s.step(0, || 0.0);
        // both scores are zero: the newcomer replaces
        assert_eq!(s.step(1, || 0.0), StepKind::Replace { evicted: 0 });
    }

    #[test]
    fn zero_capacity_never_caches() {
        let inst = CacheInstance::new(vec![0.5, 0.5], vec![0.5, 0.5], 0, CostNoise::Bernoulli).unwrap();
        let run = cucb_llm_s(&inst, 50, 1, LcbRefresh::Arriving).unwrap();
        assert!(run.final_state.cache().is_empty());
        assert!(run.regret.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn first_round_regret_is_empty_cache_gap() {
        let inst = CacheInstance::synthetic(10, 3, 0.9, CostNoise::Bernoulli, 2).unwrap();
        let run = cucb_llm_s(&inst, 1, 5, LcbRefresh::Arriving).unwrap();
        let expect = inst.cost_exact(&Action::empty_set()).unwrap() - inst.cost_exact(&inst.optimal()).unwrap();
        assert_eq!(run.regret, vec![expect]);
    }

    #[test]
    fn cache_stays_top_k_every_round() {
        for seed in 0..10 {
            let inst = CacheInstance::synthetic(8, 3, 0.9, CostNoise::Bernoulli, seed).unwrap();
            let mut ok = true;
            cucb_llm_s_with(&inst, 500, seed + 100, LcbRefresh::Arriving, |s| ok &= s.is_top_k(1e-12)).unwrap();
            assert!(ok, "instance {seed}");
        }
    }

    #[test]
    fn cumulative_regret_non_decreasing() {
        let inst = CacheInstance::synthetic(20, 5, 0.9, CostNoise::Bernoulli, 3).unwrap();
        let run = cucb_llm_s(&inst, 2000, 4, LcbRefresh::AllQueries).unwrap();
        assert!(run.regret.iter().all(|&r| r >= -1e-12));
        assert!(run.cumulative.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }
}
