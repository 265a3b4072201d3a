//! Per-arm counters, empirical means and confidence bounds.
//!
//! Unobserved arms carry no mean. Their lower bound is `-inf` and their upper
//! bound is `+inf`, so downstream oracles see them as maximally pessimistic
//! (or optimistic) without any special casing.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{CoreError, Result};

/// Counters `N_i` and empirical means `mu_hat_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmStats {
    counts: Vec<u64>,
    means: Vec<Option<f64>>,
}

impl ArmStats {
    /// Builds stats from raw counts and outcome sums.
    pub fn from_sums(counts: Vec<u64>, sums: &[f64]) -> Self {
        assert_eq!(counts.len(), sums.len());
        let means = counts
            .iter()
            .zip(sums)
            .map(|(&n, &s)| (n > 0).then(|| s / n as f64))
            .collect();
        ArmStats { counts, means }
    }

    pub fn m(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, arm: usize) -> u64 {
        self.counts[arm]
    }

    /// Empirical mean, `None` when the arm was never observed.
    pub fn mean(&self, arm: usize) -> Option<f64> {
        self.means[arm]
    }

    pub fn means(&self) -> &[Option<f64>] {
        &self.means
    }

    /// Means with unobserved arms replaced by `default`.
    pub fn means_or(&self, default: f64) -> Vec<f64> {
        self.means.iter().map(|m| m.unwrap_or(default)).collect()
    }
}

/// Single pass over the dataset: `N_i` counts records whose triggered set
/// contains `i`, and the mean averages the outcomes observed for `i`.
pub fn aggregate(dataset: &Dataset) -> ArmStats {
    let m = dataset.m();
    let mut counts = vec![0u64; m];
    let mut sums = vec![0.0f64; m];
    for rec in dataset.records() {
        for (&arm, &x) in &rec.outcomes {
            counts[arm.0] += 1;
            sums[arm.0] += x;
        }
    }
    ArmStats::from_sums(counts, &sums)
}

/// Parameters of the Hoeffding-style radius `sqrt(log(c*m*n/delta) / (2N))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceParams {
    pub delta: f64,
    pub n: usize,
    pub m: usize,
    pub log_arg_multiplier: f64,
}

impl ConfidenceParams {
    /// Multiplier used by the generic CLCB listing and the cache algorithms.
    pub const GENERIC_MULTIPLIER: f64 = 4.0;
    /// Multiplier used by the cascading specialisation and the gap bounds.
    pub const CASCADE_MULTIPLIER: f64 = 2.0;

    pub fn new(delta: f64, n: usize, m: usize) -> Result<Self> {
        Self::with_multiplier(delta, n, m, Self::GENERIC_MULTIPLIER)
    }

    pub fn with_multiplier(delta: f64, n: usize, m: usize, log_arg_multiplier: f64) -> Result<Self> {
        let p = ConfidenceParams {
            delta,
            n,
            m,
            log_arg_multiplier,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(CoreError::InvalidParams(format!(
                "delta must lie in (0,1), got {}",
                self.delta
            )));
        }
        if self.n == 0 || self.m == 0 {
            return Err(CoreError::InvalidParams(format!(
                "n and m must be positive, got n={} m={}",
                self.n, self.m
            )));
        }
        if !(self.log_arg_multiplier > 0.0 && self.log_arg_multiplier.is_finite()) {
            return Err(CoreError::InvalidParams(format!(
                "log_arg_multiplier must be positive, got {}",
                self.log_arg_multiplier
            )));
        }
        Ok(())
    }

    /// `log(c * m * n / delta)`.
    pub fn log_term(&self) -> f64 {
        (self.log_arg_multiplier * self.m as f64 * self.n as f64 / self.delta).ln()
    }
}

/// Which radius an upper bound uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RadiusForm {
    /// `sqrt(log(c m n / delta) / (2N))`
    Hoeffding,
    /// `sqrt(2 log(c m n / delta) / N)`, used for cache costs.
    Cost,
}

impl RadiusForm {
    pub fn radius(self, log_term: f64, count: u64) -> f64 {
        if count == 0 {
            return f64::INFINITY;
        }
        let n = count as f64;
        match self {
            RadiusForm::Hoeffding => (log_term / (2.0 * n)).sqrt(),
            RadiusForm::Cost => (2.0 * log_term / n).sqrt(),
        }
    }
}

/// Lower confidence bounds. Not clipped to `[0,1]`; unobserved arms get `-inf`.
pub fn lcb(stats: &ArmStats, params: &ConfidenceParams) -> Vec<f64> {
    let log_term = params.log_term();
    (0..stats.m())
        .map(|i| match stats.mean(i) {
            Some(mu) => mu - RadiusForm::Hoeffding.radius(log_term, stats.count(i)),
            None => f64::NEG_INFINITY,
        })
        .collect()
}

/// Upper confidence bounds. Not clipped; unobserved arms get `+inf`.
pub fn ucb(stats: &ArmStats, params: &ConfidenceParams, form: RadiusForm) -> Vec<f64> {
    let log_term = params.log_term();
    (0..stats.m())
        .map(|i| match stats.mean(i) {
            Some(mu) => mu + form.radius(log_term, stats.count(i)),
            None => f64::INFINITY,
        })
        .collect()
}

/// Bernstein-style radius
/// `sqrt(6 p(1-p) log(1/delta') / count) + 9 log(1/delta') / count`.
///
/// `delta_prime` is the already-split failure probability. A zero count
/// yields `+inf`.
pub fn variance_adaptive_interval(p_hat: f64, count: u64, delta_prime: f64) -> f64 {
    if count == 0 {
        return f64::INFINITY;
    }
    let l = (1.0 / delta_prime).ln();
    let c = count as f64;
    let var = (p_hat * (1.0 - p_hat)).max(0.0);
    (6.0 * var * l / c).sqrt() + 9.0 * l / c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{Action, ArmId};
    use crate::dataset::OfflineRecord;
    use approx::assert_abs_diff_eq;

    fn one(arm: usize, x: f64) -> OfflineRecord {
        OfflineRecord::new(
            Action::set([arm]).unwrap(),
            vec![ArmId(arm)],
            [(ArmId(arm), x)].into_iter().collect(),
        )
    }

    #[test]
    fn aggregate_mean_of_two() {
        let d = Dataset::new(1, vec![one(0, 1.0), one(0, 0.0)]).unwrap();
        let s = aggregate(&d);
        assert_eq!(s.count(0), 2);
        assert_eq!(s.mean(0), Some(0.5));
    }

    #[test]
    fn aggregate_empty_marks_absent() {
        let s = aggregate(&Dataset::empty(3));
        assert_eq!(s.counts(), &[0, 0, 0]);
        assert!(s.means().iter().all(Option::is_none));
    }

    #[test]
    fn aggregate_arithmetic_mean() {
        let d = Dataset::new(2, vec![one(1, 0.2), one(0, 1.0), one(1, 0.4)]).unwrap();
        let s = aggregate(&d);
        assert_eq!(s.count(1), 2);
        assert_abs_diff_eq!(s.mean(1).unwrap(), 0.3, epsilon = 1e-15);
    }

    // Reference values below come from 50-digit evaluations of the closed forms.

    #[test]
    fn lcb_closed_form() {
        let s = ArmStats::from_sums(vec![8], &[0.6 * 8.0]);
        let p = ConfidenceParams::new(0.05, 10, 2).unwrap();
        assert_eq!(p.log_arg_multiplier, 4.0);
        let v = lcb(&s, &p);
        assert_abs_diff_eq!(v[0], -0.079_050_757_870_309_77, epsilon = 1e-12);
    }

    #[test]
    fn lcb_large_count() {
        let s = ArmStats::from_sums(vec![100_000_000], &[1e8]);
        let p = ConfidenceParams::new(0.5, 1, 1).unwrap();
        assert_abs_diff_eq!(lcb(&s, &p)[0], 0.999_898_033_300_983_1, epsilon = 1e-12);
    }

    #[test]
    fn unobserved_sentinels() {
        let s = ArmStats::from_sums(vec![0], &[0.0]);
        let p = ConfidenceParams::new(0.1, 5, 1).unwrap();
        assert_eq!(lcb(&s, &p)[0], f64::NEG_INFINITY);
        assert_eq!(ucb(&s, &p, RadiusForm::Hoeffding)[0], f64::INFINITY);
        assert_eq!(ucb(&s, &p, RadiusForm::Cost)[0], f64::INFINITY);
    }

    #[test]
    fn ucb_cost_form() {
        let s = ArmStats::from_sums(vec![32], &[16.0]);
        let p = ConfidenceParams::new(0.05, 1000, 100).unwrap();
        assert_abs_diff_eq!(
            ucb(&s, &p, RadiusForm::Cost)[0],
            1.496_711_847_139_260_6,
            epsilon = 1e-12
        );
    }

    #[test]
    fn ucb_hoeffding_mirrors_lcb() {
        let s = ArmStats::from_sums(vec![8], &[0.6 * 8.0]);
        let p = ConfidenceParams::new(0.05, 10, 2).unwrap();
        assert_abs_diff_eq!(
            ucb(&s, &p, RadiusForm::Hoeffding)[0],
            1.279_050_757_870_309_7,
            epsilon = 1e-12
        );
    }

    #[test]
    fn variance_adaptive_values() {
        assert_abs_diff_eq!(
            variance_adaptive_interval(0.0, 100, 0.01),
            0.414_465_316_738_928_2,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            variance_adaptive_interval(0.5, 400, 0.01),
            0.235_029_373_428_655_35,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            variance_adaptive_interval(1.0, 10, 0.5),
            0.623_832_462_503_950_8,
            epsilon = 1e-12
        );
        assert_eq!(variance_adaptive_interval(0.3, 0, 0.1), f64::INFINITY);
    }

    #[test]
    fn variance_adaptive_degenerate_is_pure_bias_term() {
        for p in [0.0, 1.0] {
            let l = (1.0f64 / 0.02).ln();
            assert_eq!(variance_adaptive_interval(p, 37, 0.02), 9.0 * l / 37.0);
        }
    }

    #[test]
    fn params_rejected() {
        assert!(ConfidenceParams::new(0.0, 1, 1).is_err());
        assert!(ConfidenceParams::new(1.0, 1, 1).is_err());
        assert!(ConfidenceParams::new(0.1, 0, 1).is_err());
        assert!(ConfidenceParams::new(0.1, 1, 0).is_err());
        assert!(ConfidenceParams::with_multiplier(0.1, 1, 1, 0.0).is_err());
    }
}
