use std::collections::BTreeMap;

use cmabt_core::Action;
use serde::{Deserialize, Serialize};

/// The chosen action plus named numeric diagnostics (per-arm bounds,
/// counters, the oracle's objective value).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmOutput {
    pub action: Action,
    pub diagnostics: BTreeMap<String, f64>,
}

impl AlgorithmOutput {
    pub fn new(action: Action) -> Self {
        AlgorithmOutput {
            action,
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: impl Into<String>, value: f64) -> Self {
        self.diagnostics.insert(name.into(), value);
        self
    }

    /// Records `values` as `name[0]`, `name[1]`, ...
    pub fn with_vector(mut self, name: &str, values: &[f64]) -> Self {
        for (i, v) in values.iter().enumerate() {
            self.diagnostics.insert(format!("{name}[{i}]"), *v);
        }
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.diagnostics.get(name).copied()
    }

    /// Reads back a vector stored with [`AlgorithmOutput::with_vector`].
    pub fn vector(&self, name: &str) -> Vec<f64> {
        (0..)
            .map_while(|i| self.diagnostics.get(&format!("{name}[{i}]")).copied())
            .collect()
    }
}
