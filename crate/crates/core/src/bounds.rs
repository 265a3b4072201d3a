//! Closed-form suboptimality-gap upper bounds and the sample-size condition
//! under which they hold.

use serde::{Deserialize, Serialize};

use crate::coverage::CoverageReport;
use crate::error::{CoreError, Result};

/// Smoothness coefficient `B1` and oracle approximation ratio `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessSpec {
    pub b1: f64,
    pub alpha: f64,
}

impl SmoothnessSpec {
    pub fn new(b1: f64, alpha: f64) -> Result<Self> {
        if !(b1 > 0.0 && b1.is_finite()) {
            return Err(CoreError::InvalidParams(format!("b1 must be positive, got {b1}")));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(CoreError::InvalidParams(format!(
                "alpha must lie in (0,1], got {alpha}"
            )));
        }
        Ok(SmoothnessSpec { b1, alpha })
    }

    /// `B1 = 1`, exact oracle.
    pub fn unit() -> Self {
        SmoothnessSpec { b1: 1.0, alpha: 1.0 }
    }
}

fn log_2mn(m: usize, n: usize, delta: f64) -> f64 {
    (2.0 * m as f64 * n as f64 / delta).ln()
}

/// `2 alpha B1 K2 sqrt(2 C_inf log(2mn/delta) / n)`.
pub fn gap_bound_inf(s: SmoothnessSpec, k_bar_2: f64, c_inf: f64, m: usize, n: usize, delta: f64) -> f64 {
    2.0 * s.alpha * s.b1 * k_bar_2 * (2.0 * c_inf * log_2mn(m, n, delta) / n as f64).sqrt()
}

/// `2 alpha B1 sqrt(2 K C_1 log(2mn/delta) / n)`.
pub fn gap_bound_one(s: SmoothnessSpec, k_bar: f64, c_one: f64, m: usize, n: usize, delta: f64) -> f64 {
    2.0 * s.alpha * s.b1 * (2.0 * k_bar * c_one * log_2mn(m, n, delta) / n as f64).sqrt()
}

/// Minimum `n` for the bounds: `8 log(m/delta) / p_star`.
pub fn min_samples(p_star: f64, m: usize, delta: f64) -> f64 {
    8.0 * (m as f64 / delta).ln() / p_star
}

/// Both bounds evaluated at one dataset size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapBounds {
    pub n: usize,
    pub inf_norm: f64,
    pub one_norm: f64,
    /// Whether `n` meets the sample-size condition.
    pub n_sufficient: bool,
}

impl GapBounds {
    pub fn evaluate(report: &CoverageReport, s: SmoothnessSpec, n: usize, delta: f64) -> Self {
        let m = report.p_opt.len();
        let n_sufficient = report
            .p_star()
            .map(|p| p > 0.0 && n as f64 >= min_samples(p, m, delta))
            .unwrap_or(true);
        GapBounds {
            n,
            inf_norm: gap_bound_inf(s, report.k_bar_2, report.c_inf, m, n, delta),
            one_norm: gap_bound_one(s, report.k_bar, report.c_one, m, n, delta),
            n_sufficient,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_match_hand_evaluation() {
        let s = SmoothnessSpec::unit();
        // k-path style: K2 = 2, C_inf = 4, m = 4, n = 100, delta = 0.1
        let l = (2.0f64 * 4.0 * 100.0 / 0.1).ln();
        let expect = 2.0 * 2.0 * (8.0 * l / 100.0).sqrt();
        assert!((gap_bound_inf(s, 2.0, 4.0, 4, 100, 0.1) - expect).abs() < 1e-12);
        let expect = 2.0 * (2.0 * 2.0 * 8.0 * l / 100.0).sqrt();
        assert!((gap_bound_one(s, 2.0, 8.0, 4, 100, 0.1) - expect).abs() < 1e-12);
    }

    #[test]
    fn bound_shrinks_like_inverse_sqrt() {
        let s = SmoothnessSpec::unit();
        let a = gap_bound_inf(s, 1.0, 1.0, 10, 1000, 0.1);
        let b = gap_bound_inf(s, 1.0, 1.0, 10, 4000, 0.1);
        assert!(b < a / 1.8 && b > a / 2.2);
    }

    #[test]
    fn smoothness_validation() {
        assert!(SmoothnessSpec::new(0.0, 1.0).is_err());
        assert!(SmoothnessSpec::new(1.0, 0.0).is_err());
        assert!(SmoothnessSpec::new(1.0, 1.5).is_err());
        assert!(SmoothnessSpec::new(3.0, 0.5).is_ok());
    }
}
