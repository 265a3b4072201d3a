//! LLM response cache: queries arrive from a fixed distribution, a miss costs
//! a noisy amount, a hit is free.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use cmabt_core::{rng_from_seed, Action, ActionKind, ArmId, CoreError, CoverageModel};
use cmabt_oracles::{top_k, Direction};
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{EnvError, Result};

/// Zero-mean noise around `c(q)`, realised costs stay in `[0,1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostNoise {
    /// Cost is 1 with probability `c(q)`, else 0.
    #[default]
    Bernoulli,
    /// `c(q) + U[-w, w]` with `w = min(width, c(q), 1 - c(q))`.
    TruncatedUniform { width: f64 },
}

impl CostNoise {
    pub fn sample(self, mean: f64, rng: &mut dyn RngCore) -> f64 {
        match self {
            CostNoise::Bernoulli => {
                if rng.gen::<f64>() < mean {
                    1.0
                } else {
                    0.0
                }
            }
            CostNoise::TruncatedUniform { width } => {
                let w = width.min(mean).min(1.0 - mean).max(0.0);
                let u: f64 = rng.gen();
                (mean + w * (2.0 * u - 1.0)).clamp(0.0, 1.0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheInstance {
    p: Vec<f64>,
    c: Vec<f64>,
    k: usize,
    #[serde(default)]
    noise: CostNoise,
}

/// `P(q_i) ∝ (i+1)^(-alpha)`, query 0 most frequent.
pub fn power_law(m: usize, alpha: f64) -> Vec<f64> {
    let raw: Vec<f64> = (1..=m).map(|i| (i as f64).powf(-alpha)).collect();
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / z).collect()
}

impl CacheInstance {
    pub fn new(p: Vec<f64>, c: Vec<f64>, k: usize, noise: CostNoise) -> Result<Self> {
        if p.len() != c.len() || p.is_empty() {
            return Err(EnvError::InvalidInstance(format!(
                "arrival and cost vectors must be non-empty and equal length, got {} and {}",
                p.len(),
                c.len()
            )));
        }
        let total: f64 = p.iter().sum();
        if p.iter().any(|x| !(*x >= 0.0)) || (total - 1.0).abs() > 1e-9 {
            return Err(EnvError::InvalidInstance(format!(
                "arrival probabilities must be non-negative and sum to 1, sum is {total}"
            )));
        }
        if let Some(x) = c.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(EnvError::InvalidInstance(format!("cost {x} outside [0,1]")));
        }
        if k > p.len() {
            return Err(EnvError::InvalidInstance(format!("capacity {k} exceeds {} queries", p.len())));
        }
        if let CostNoise::TruncatedUniform { width } = noise {
            if !(width >= 0.0) {
                return Err(EnvError::InvalidInstance(format!("noise width {width} is negative")));
            }
        }
        Ok(CacheInstance { p, c, k, noise })
    }

    /// Power-law arrivals and per-query mean costs drawn from `U[0,1]`.
    pub fn synthetic(m: usize, k: usize, alpha: f64, noise: CostNoise, instance_seed: u64) -> Result<Self> {
        let mut rng = rng_from_seed(instance_seed);
        let c = (0..m).map(|_| rng.gen::<f64>()).collect();
        Self::new(power_law(m, alpha), c, k, noise)
    }

    pub fn m(&self) -> usize {
        self.p.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn noise(&self) -> CostNoise {
        self.noise
    }

    fn check_cache(&self, cache: &Action) -> Result<()> {
        cache.check_range(self.m())?;
        if cache.len() > self.k {
            return Err(EnvError::InfeasibleAction(format!(
                "cache of size {} exceeds capacity {}",
                cache.len(),
                self.k
            )));
        }
        Ok(())
    }

    /// `sum_{q not in cache} p(q) c(q)`.
    pub fn cost_exact(&self, cache: &Action) -> Result<f64> {
        self.check_cache(cache)?;
        Ok(self.cost_unchecked(cache))
    }

    pub(crate) fn cost_unchecked(&self, cache: &Action) -> f64 {
        (0..self.m())
            .filter(|&q| !cache.contains(ArmId(q)))
            .map(|q| self.p[q] * self.c[q])
            .sum()
    }

    /// Top-k queries by `p(q) c(q)`.
    pub fn optimal(&self) -> Action {
        let w: Vec<f64> = self.p.iter().zip(&self.c).map(|(p, c)| p * c).collect();
        top_k(&w, self.k, Direction::Max).expect("k <= m by construction")
    }

    pub fn arrival_sampler(&self) -> WeightedIndex<f64> {
        WeightedIndex::new(&self.p).expect("validated distribution")
    }

    pub fn sample_cost(&self, q: usize, rng: &mut dyn RngCore) -> f64 {
        self.noise.sample(self.c[q], rng)
    }
}

/// The experimenter's cache in each offline round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CacheCollection {
    /// Empty cache: every arrival is a miss.
    #[default]
    Empty,
    /// Every query cached: every arrival is a hit.
    Full,
    Fixed { cache: Vec<usize> },
    /// Each query independently left out of the cache with probability `nu[q]`.
    Exclusion { nu: Vec<f64> },
}

impl CacheCollection {
    pub fn validate(&self, m: usize) -> Result<()> {
        match self {
            CacheCollection::Fixed { cache } => {
                Action::set(cache.iter().copied())?.check_range(m)?;
            }
            CacheCollection::Exclusion { nu } => {
                if nu.len() != m || nu.iter().any(|x| !(0.0..=1.0).contains(x)) {
                    return Err(EnvError::InvalidInstance(format!(
                        "exclusion probabilities must be {m} values in [0,1]"
                    )));
                }
            }
            CacheCollection::Empty | CacheCollection::Full => {}
        }
        Ok(())
    }

    pub fn sample(&self, m: usize, rng: &mut dyn RngCore) -> Result<Action> {
        Ok(match self {
            CacheCollection::Empty => Action::empty_set(),
            CacheCollection::Full => Action::set(0..m)?,
            CacheCollection::Fixed { cache } => Action::set(cache.iter().copied())?,
            CacheCollection::Exclusion { nu } => {
                Action::set((0..m).filter(|&q| rng.gen::<f64>() >= nu[q]))?
            }
        })
    }

    /// `nu(q)`: probability that `q` is absent from a sampled cache.
    pub fn exclusion_probs(&self, m: usize) -> Vec<f64> {
        match self {
            CacheCollection::Empty => vec![1.0; m],
            CacheCollection::Full => vec![0.0; m],
            CacheCollection::Fixed { cache } => (0..m)
                .map(|q| if cache.contains(&q) { 0.0 } else { 1.0 })
                .collect(),
            CacheCollection::Exclusion { nu } => nu.clone(),
        }
    }
}

/// One offline round. The cost is present only on a miss.
///
/// Wire format extends the generic record:
/// `{"action":{"kind":"set","members":[..]},"triggered":[q],"outcomes":{"q":cost},"query":q,"cost":cost}`
/// with `triggered`/`outcomes` empty and `cost` null on a hit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub action: Action,
    pub triggered: Vec<ArmId>,
    pub outcomes: BTreeMap<ArmId, f64>,
    pub query: ArmId,
    pub cost: Option<f64>,
}

impl CacheRecord {
    pub fn new(cache: Action, query: usize, cost: Option<f64>) -> Self {
        let (triggered, outcomes) = match cost {
            Some(x) => (vec![ArmId(query)], [(ArmId(query), x)].into_iter().collect()),
            None => (Vec::new(), BTreeMap::new()),
        };
        CacheRecord {
            action: cache,
            triggered,
            outcomes,
            query: ArmId(query),
            cost,
        }
    }

    pub fn is_miss(&self) -> bool {
        self.cost.is_some()
    }

    fn validate(&self, index: usize, m: usize) -> cmabt_core::Result<()> {
        let bad = |reason: String| CoreError::MalformedRecord { index, reason };
        self.action.check_range(m).map_err(|e| bad(e.to_string()))?;
        if self.query.0 >= m {
            return Err(bad(format!("query {} out of range", self.query)));
        }
        let hit = self.action.contains(self.query);
        match self.cost {
            Some(x) if hit => Err(bad(format!("cost {x} recorded on a hit"))),
            None if !hit => Err(bad("miss without a cost".into())),
            Some(x) if !(0.0..=1.0).contains(&x) => Err(bad(format!("cost {x} outside [0,1]"))),
            _ => {
                let expect = CacheRecord::new(self.action.clone(), self.query.0, self.cost);
                if expect.triggered != self.triggered || expect.outcomes != self.outcomes {
                    return Err(bad("triggered/outcomes disagree with query and cost".into()));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CacheDataset {
    m: usize,
    records: Vec<CacheRecord>,
}

impl CacheDataset {
    pub fn new(m: usize, records: Vec<CacheRecord>) -> cmabt_core::Result<Self> {
        for (i, r) in records.iter().enumerate() {
            r.validate(i, m)?;
        }
        Ok(CacheDataset { m, records })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[CacheRecord] {
        &self.records
    }

    /// Arrival counts `N(q)`.
    pub fn arrival_counts(&self) -> Vec<u64> {
        let mut n = vec![0u64; self.m];
        for r in &self.records {
            n[r.query.0] += 1;
        }
        n
    }

    /// Miss counts `N_c(q)` and summed observed costs.
    pub fn cost_sums(&self) -> (Vec<u64>, Vec<f64>) {
        let mut n = vec![0u64; self.m];
        let mut s = vec![0.0; self.m];
        for r in &self.records {
            if let Some(x) = r.cost {
                n[r.query.0] += 1;
                s[r.query.0] += x;
            }
        }
        (n, s)
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> cmabt_core::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut w, r).map_err(|e| CoreError::Io(e.to_string()))?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("json is utf-8")
    }

    pub fn read_jsonl<R: BufRead>(reader: R, m: usize) -> cmabt_core::Result<Self> {
        let mut records = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let r: CacheRecord = serde_json::from_str(&line).map_err(|e| CoreError::Parse {
                line: i + 1,
                reason: e.to_string(),
            })?;
            records.push(r);
        }
        Self::new(m, records)
    }
}

/// `n` offline rounds: cache from `collection`, query from `p`, cost
/// revealed on a miss.
pub fn cache_generate(
    inst: &CacheInstance,
    collection: &CacheCollection,
    n: usize,
    seed: u64,
) -> Result<CacheDataset> {
    collection.validate(inst.m())?;
    let mut rng = rng_from_seed(seed);
    let arrivals = inst.arrival_sampler();
    let mut records = Vec::with_capacity(n);
    for _ in 0..n {
        let cache = collection.sample(inst.m(), &mut rng)?;
        let q = arrivals.sample(&mut rng);
        let cost = (!cache.contains(ArmId(q))).then(|| inst.sample_cost(q, &mut rng));
        records.push(CacheRecord::new(cache, q, cost));
    }
    Ok(CacheDataset::new(inst.m(), records)?)
}

/// Arm view with `2m` arms: `q` is the cost of query `q`, `m + q` its
/// arrival indicator. Every arrival arm is observed each round; a cost arm
/// only on a miss.
impl CoverageModel for CacheInstance {
    type Collection = CacheCollection;

    fn arm_count(&self) -> usize {
        2 * self.m()
    }

    fn check_action(&self, action: &Action) -> cmabt_core::Result<()> {
        if action.kind() != ActionKind::Set {
            return Err(CoreError::InfeasibleAction("a cache is a set of queries".into()));
        }
        Ok(self.check_cache(action)?)
    }

    fn sample_triggered(&self, action: &Action, rng: &mut dyn RngCore) -> Vec<ArmId> {
        let q = self.arrival_sampler().sample(rng);
        let m = self.m();
        let mut t: Vec<ArmId> = (m..2 * m).map(ArmId).collect();
        if !action.contains(ArmId(q)) {
            t.push(ArmId(q));
        }
        t
    }

    fn sample_collection(&self, dist: &CacheCollection, rng: &mut dyn RngCore) -> cmabt_core::Result<Action> {
        Ok(dist.sample(self.m(), rng)?)
    }

    fn exact_triggering(&self, action: &Action) -> Option<Vec<f64>> {
        let m = self.m();
        let mut p: Vec<f64> = (0..m)
            .map(|q| if action.contains(ArmId(q)) { 0.0 } else { self.p[q] })
            .collect();
        p.extend(std::iter::repeat_n(1.0, m));
        Some(p)
    }

    fn exact_collection_triggering(&self, dist: &CacheCollection) -> Option<Vec<f64>> {
        let m = self.m();
        let nu = dist.exclusion_probs(m);
        let mut p: Vec<f64> = (0..m).map(|q| self.p[q] * nu[q]).collect();
        p.extend(std::iter::repeat_n(1.0, m));
        Some(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cmabt_core::coverage_report;

    fn two() -> CacheInstance {
        CacheInstance::new(vec![0.5, 0.5], vec![1.0, 0.2], 1, CostNoise::Bernoulli).unwrap()
    }

    #[test]
    fn cost_examples() {
        let full = CacheInstance::new(vec![0.5, 0.5], vec![1.0, 0.2], 2, CostNoise::Bernoulli).unwrap();
        assert_eq!(full.cost_exact(&Action::set([0, 1]).unwrap()).unwrap(), 0.0);
        assert_eq!(full.cost_exact(&Action::empty_set()).unwrap(), 0.6);
        assert!((two().cost_exact(&Action::set([0]).unwrap()).unwrap() - 0.1).abs() < 1e-15);
        assert!(two().cost_exact(&Action::set([0, 1]).unwrap()).is_err());
        assert_eq!(two().optimal(), Action::set([0]).unwrap());
    }

    #[test]
    fn invalid_instances_rejected() {
        assert!(CacheInstance::new(vec![0.5, 0.4], vec![0.1, 0.1], 1, CostNoise::Bernoulli).is_err());
        assert!(CacheInstance::new(vec![0.5, 0.5], vec![0.1, 1.1], 1, CostNoise::Bernoulli).is_err());
        assert!(CacheInstance::new(vec![0.5, 0.5], vec![0.1, 0.1], 3, CostNoise::Bernoulli).is_err());
    }

    #[test]
    fn empty_collection_always_misses() {
        let d = cache_generate(&two(), &CacheCollection::Empty, 300, 3).unwrap();
        assert!(d.records().iter().all(CacheRecord::is_miss));
    }

    #[test]
    fn full_collection_never_misses() {
        let d = cache_generate(&two(), &CacheCollection::Full, 300, 3).unwrap();
        assert!(d.records().iter().all(|r| !r.is_miss()));
        assert!(d.cost_sums().0.iter().all(|&n| n == 0));
    }

    #[test]
    fn miss_frequency_matches_p_nu() {
        let inst = CacheInstance::new(vec![0.2, 0.3, 0.5], vec![0.5; 3], 3, CostNoise::Bernoulli).unwrap();
        let coll = CacheCollection::Exclusion { nu: vec![0.9, 0.5, 0.2] };
        let n = 40_000;
        let d = cache_generate(&inst, &coll, n, 17).unwrap();
        let (misses, _) = d.cost_sums();
        for q in 0..3 {
            let p = inst.p()[q] * coll.exclusion_probs(3)[q];
            let f = misses[q] as f64 / n as f64;
            assert!((f - p).abs() <= 4.0 * (p * (1.0 - p) / n as f64).sqrt(), "query {q}: {f} vs {p}");
        }
    }

    #[test]
    fn power_law_slope() {
        let inst = CacheInstance::synthetic(100, 40, 0.9, CostNoise::Bernoulli, 1).unwrap();
        let d = cache_generate(&inst, &CacheCollection::Empty, 200_000, 2).unwrap();
        let counts = d.arrival_counts();
        let pts: Vec<(f64, f64)> = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (((i + 1) as f64).ln(), (c as f64).ln()))
            .collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let slope = sxy / sxx;
        assert!((slope + 0.9).abs() <= 0.1, "slope {slope}");
    }

    #[test]
    fn truncated_uniform_noise_is_centred_and_bounded() {
        let mut rng = rng_from_seed(6);
        let noise = CostNoise::TruncatedUniform { width: 0.3 };
        let xs: Vec<f64> = (0..50_000).map(|_| noise.sample(0.8, &mut rng)).collect();
        assert!(xs.iter().all(|x| (0.6..=1.0).contains(x)));
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - 0.8).abs() < 0.003);
    }

    #[test]
    fn jsonl_round_trip() {
        let inst = CacheInstance::synthetic(6, 2, 0.9, CostNoise::Bernoulli, 4).unwrap();
        let coll = CacheCollection::Fixed { cache: vec![0, 3] };
        let d = cache_generate(&inst, &coll, 50, 9).unwrap();
        let s = d.to_jsonl_string();
        let back = CacheDataset::read_jsonl(s.as_bytes(), 6).unwrap();
        assert_eq!(back, d);
        let hit = r#"{"action":{"kind":"set","members":[1]},"triggered":[],"outcomes":{},"query":1,"cost":null}"#;
        assert!(CacheDataset::read_jsonl(hit.as_bytes(), 2).is_ok());
        let bad = r#"{"action":{"kind":"set","members":[1]},"triggered":[],"outcomes":{},"query":1,"cost":0.5}"#;
        assert!(CacheDataset::read_jsonl(bad.as_bytes(), 2).is_err());
    }

    #[test]
    fn empty_collection_coverage() {
        let inst = CacheInstance::synthetic(100, 40, 0.9, CostNoise::Bernoulli, 1).unwrap();
        let r = coverage_report(&inst, &CacheCollection::Empty, &inst.optimal(), 0, 0).unwrap();
        // sum over uncached queries of 1/nu(q), plus one per arrival arm
        assert!((r.c_one - 160.0).abs() < 1e-9);
        let nu = vec![0.5; 100];
        let r = coverage_report(&inst, &CacheCollection::Exclusion { nu }, &inst.optimal(), 0, 0).unwrap();
        assert!((r.c_one - 220.0).abs() < 1e-9);
    }
}
