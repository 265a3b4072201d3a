//! Offline cache selection from logged `(cache, query, cost)` rounds.

use cmabt_envs::CacheDataset;
use cmabt_oracles::{top_k, Direction};

use crate::error::{AlgoError, Result};
use crate::output::AlgorithmOutput;

/// Counters and empirical estimates shared by the cache learners.
#[derive(Debug, Clone, PartialEq)]
pub struct CacheStats {
    pub n: usize,
    pub arrivals: Vec<u64>,
    pub misses: Vec<u64>,
    /// `p_hat(q) = N(q) / n`.
    pub p_hat: Vec<f64>,
    /// Mean observed cost, `None` if `q` never missed.
    pub c_hat: Vec<Option<f64>>,
}

impl CacheStats {
    pub fn from_dataset(d: &CacheDataset) -> Result<Self> {
        if d.is_empty() {
            return Err(AlgoError::EmptyDataset);
        }
        let n = d.len();
        let arrivals = d.arrival_counts();
        let (misses, sums) = d.cost_sums();
        let p_hat = arrivals.iter().map(|&a| a as f64 / n as f64).collect();
        let c_hat = misses
            .iter()
            .zip(&sums)
            .map(|(&k, &s)| (k > 0).then(|| s / k as f64))
            .collect();
        Ok(CacheStats {
            n,
            arrivals,
            misses,
            p_hat,
            c_hat,
        })
    }

    pub fn m(&self) -> usize {
        self.arrivals.len()
    }

    /// `log(4 m n / delta)`.
    pub fn log_term(&self, delta: f64) -> Result<f64> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(AlgoError::InvalidParams(format!("delta must lie in (0,1), got {delta}")));
        }
        Ok((4.0 * self.m() as f64 * self.n as f64 / delta).ln())
    }

    /// `c_hat + sqrt(2 L / N_c)`, `+inf` for never-missed queries.
    pub fn cost_ucb(&self, log_term: f64) -> Vec<f64> {
        self.c_hat
            .iter()
            .zip(&self.misses)
            .map(|(c, &k)| match c {
                Some(c) => c + (2.0 * log_term / k as f64).sqrt(),
                None => f64::INFINITY,
            })
            .collect()
    }
}

// 0 * inf is taken as 0: a query never seen saves nothing in expectation.
fn product(p: f64, c: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        p * c
    }
}

fn select(stats: &CacheStats, weights: Vec<f64>, k: usize) -> Result<AlgorithmOutput> {
    let cache = top_k(&weights, k, Direction::Max)?;
    let arrivals: Vec<f64> = stats.arrivals.iter().map(|&a| a as f64).collect();
    let misses: Vec<f64> = stats.misses.iter().map(|&a| a as f64).collect();
    Ok(AlgorithmOutput::new(cache)
        .with_vector("weight", &weights)
        .with_vector("arrivals", &arrivals)
        .with_vector("misses", &misses)
        .with_vector("p_hat", &stats.p_hat))
}

/// Top-k of `p_bar(q) c_bar(q)`, upper bounds on both factors.
pub fn clcb_llm_std(d: &CacheDataset, k: usize, delta: f64) -> Result<AlgorithmOutput> {
    let s = CacheStats::from_dataset(d)?;
    let l = s.log_term(delta)?;
    let c_bar = s.cost_ucb(l);
    let bonus = (2.0 * l / s.n as f64).sqrt();
    let p_bar: Vec<f64> = s.p_hat.iter().map(|p| p + bonus).collect();
    let w = p_bar.iter().zip(&c_bar).map(|(&p, &c)| product(p, c)).collect();
    Ok(select(&s, w, k)?.with_vector("p_bar", &p_bar).with_vector("c_bar", &c_bar))
}

/// Top-k of `p_hat(q) c_bar(q)`: arrivals are fully observed, so only the
/// cost carries a bonus.
pub fn clcb_llm_c(d: &CacheDataset, k: usize, delta: f64) -> Result<AlgorithmOutput> {
    let s = CacheStats::from_dataset(d)?;
    let l = s.log_term(delta)?;
    let c_bar = s.cost_ucb(l);
    let w = s.p_hat.iter().zip(&c_bar).map(|(&p, &c)| product(p, c)).collect();
    Ok(select(&s, w, k)?.with_vector("c_bar", &c_bar))
}

/// Least-frequently-used: keep the `k` most frequent queries.
pub fn lfu(d: &CacheDataset, k: usize) -> Result<AlgorithmOutput> {
    let s = CacheStats::from_dataset(d)?;
    let w = s.arrivals.iter().map(|&a| a as f64).collect();
    select(&s, w, k)
}

/// Least-expected-cost: keep the `k` largest `p_hat(q) c_hat(q)`, unobserved
/// costs counted as 0.
pub fn lec(d: &CacheDataset, k: usize) -> Result<AlgorithmOutput> {
    let s = CacheStats::from_dataset(d)?;
    let w = s
        .p_hat
        .iter()
        .zip(&s.c_hat)
        .map(|(p, c)| p * c.unwrap_or(0.0))
        .collect();
    select(&s, w, k)
}
