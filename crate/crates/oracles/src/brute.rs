//! Exhaustive argmax over small feasible sets, used as a reference optimum.

use cmabt_core::Action;

use crate::error::{OracleError, Result};

/// Largest feasible set `brute_force_best` will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 1_000_000;

/// A finite, enumerable feasible action set.
pub trait FeasibleSet {
    /// Number of actions (saturating).
    fn size(&self) -> u128;
    fn for_each_action(&self, f: &mut dyn FnMut(Action));
}

/// All ordered lists of `len` distinct arms out of `m`.
#[derive(Debug, Clone, Copy)]
pub struct OrderedLists {
    pub m: usize,
    pub len: usize,
}

/// All subsets of `[m]` with exactly `size` members, or at most `size` when
/// `up_to` is set.
#[derive(Debug, Clone, Copy)]
pub struct Subsets {
    pub m: usize,
    pub size: usize,
    pub up_to: bool,
}

/// An explicit list of actions.
#[derive(Debug, Clone)]
pub struct Explicit(pub Vec<Action>);

fn falling(m: usize, len: usize) -> u128 {
    (0..len).fold(1u128, |acc, i| acc.saturating_mul((m - i) as u128))
}

fn binom(m: usize, k: usize) -> u128 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((m - i) as u128) / (i as u128 + 1))
}

impl FeasibleSet for OrderedLists {
    fn size(&self) -> u128 {
        if self.len > self.m {
            0
        } else {
            falling(self.m, self.len)
        }
    }

    fn for_each_action(&self, f: &mut dyn FnMut(Action)) {
        fn rec(m: usize, len: usize, cur: &mut Vec<usize>, used: &mut [bool], f: &mut dyn FnMut(Action)) {
            if cur.len() == len {
                f(Action::list(cur.iter().copied()).expect("distinct by construction"));
                return;
            }
            for i in 0..m {
                if !used[i] {
                    used[i] = true;
                    cur.push(i);
                    rec(m, len, cur, used, f);
                    cur.pop();
                    used[i] = false;
                }
            }
        }
        if self.len <= self.m {
            rec(self.m, self.len, &mut Vec::new(), &mut vec![false; self.m], f);
        }
    }
}

impl FeasibleSet for Subsets {
    fn size(&self) -> u128 {
        if self.up_to {
            (0..=self.size.min(self.m)).fold(0u128, |acc, k| acc.saturating_add(binom(self.m, k)))
        } else {
            binom(self.m, self.size)
        }
    }

    fn for_each_action(&self, f: &mut dyn FnMut(Action)) {
        fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(Action)) {
            if cur.len() == k {
                f(Action::set(cur.iter().copied()).expect("distinct by construction"));
                return;
            }
            for i in start..m {
                cur.push(i);
                rec(i + 1, m, k, cur, f);
                cur.pop();
            }
        }
        let lo = if self.up_to { 0 } else { self.size };
        for k in lo..=self.size.min(self.m) {
            rec(0, self.m, k, &mut Vec::new(), f);
        }
    }
}

impl FeasibleSet for Explicit {
    fn size(&self) -> u128 {
        self.0.len() as u128
    }

    fn for_each_action(&self, f: &mut dyn FnMut(Action)) {
        self.0.iter().cloned().for_each(f)
    }
}

/// Exhaustive argmax of `reward(action, weights)`. Rewards within a relative
/// `1e-12` count as ties, resolved toward the lexicographically smallest
/// member sequence. Returns the action and its reward.
pub fn brute_force_best<F>(reward: F, feasible: &dyn FeasibleSet, weights: &[f64]) -> Result<(Action, f64)>
where
    F: Fn(&Action, &[f64]) -> f64,
{
    let size = feasible.size();
    if size > BRUTE_FORCE_LIMIT {
        return Err(OracleError::FeasibleTooLarge {
            size,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut best: Option<(Action, f64)> = None;
    feasible.for_each_action(&mut |a| {
        let r = reward(&a, weights);
        let replace = match &best {
            None => true,
            Some((b, br)) => {
                let tol = 1e-12 * br.abs().max(r.abs()).max(1.0);
                if (r - br).abs() <= tol {
                    a.indices() < b.indices()
                } else {
                    r > *br
                }
            }
        };
        if replace {
            best = Some((a, r));
        }
    });
    best.ok_or(OracleError::EmptyFeasible)
}
