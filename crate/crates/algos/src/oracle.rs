//! Solvers the offline algorithms call on a weight vector.

use cmabt_core::Action;
use cmabt_oracles::{top_k, top_k_list, Direction, OracleError};

/// Maps a per-arm weight vector to an action.
pub trait Oracle {
    fn solve(&self, weights: &[f64]) -> Result<Action, OracleError>;

    /// Approximation ratio.
    fn alpha(&self) -> f64 {
        1.0
    }
}

impl<F> Oracle for F
where
    F: Fn(&[f64]) -> Result<Action, OracleError>,
{
    fn solve(&self, weights: &[f64]) -> Result<Action, OracleError> {
        self(weights)
    }
}

/// The `k` largest (or smallest) weights, as a set or as a ranked list.
#[derive(Debug, Clone, Copy)]
pub struct TopKOracle {
    pub k: usize,
    pub direction: Direction,
    pub ranked: bool,
}

impl TopKOracle {
    pub fn set(k: usize) -> Self {
        TopKOracle {
            k,
            direction: Direction::Max,
            ranked: false,
        }
    }

    pub fn ranked(k: usize) -> Self {
        TopKOracle {
            k,
            direction: Direction::Max,
            ranked: true,
        }
    }
}

impl Oracle for TopKOracle {
    fn solve(&self, weights: &[f64]) -> Result<Action, OracleError> {
        if self.ranked {
            top_k_list(weights, self.k, self.direction)
        } else {
            top_k(weights, self.k, self.direction)
        }
    }
}

/// Best of the `m/k` disjoint paths `{jk, ..., jk+k-1}` by summed weight.
/// Ties go to the lowest path index; a `-inf` arm sinks its path.
#[derive(Debug, Clone, Copy)]
pub struct PathOracle {
    pub k: usize,
}

impl Oracle for PathOracle {
    fn solve(&self, weights: &[f64]) -> Result<Action, OracleError> {
        let m = weights.len();
        if self.k == 0 || !m.is_multiple_of(self.k) || m == 0 {
            return Err(OracleError::KTooLarge { k: self.k, m });
        }
        if let Some(i) = weights.iter().position(|w| w.is_nan()) {
            return Err(OracleError::NanWeight(i));
        }
        let score = |j: usize| {
            let s: f64 = weights[j * self.k..(j + 1) * self.k].iter().sum();
            if s.is_nan() {
                f64::NEG_INFINITY
            } else {
                s
            }
        };
        let mut best = 0;
        for j in 1..m / self.k {
            if score(j) > score(best) {
                best = j;
            }
        }
        Ok(Action::set(best * self.k..(best + 1) * self.k)?)
    }
}
