//! Offline records and datasets, with the JSON-lines wire format.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::action::{Action, ArmId};
use crate::error::{CoreError, Result};

/// One offline sample: the played action, the triggered arms and their
/// observed outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OfflineRecord {
    pub action: Action,
    pub triggered: Vec<ArmId>,
    pub outcomes: BTreeMap<ArmId, f64>,
}

impl OfflineRecord {
    pub fn new(action: Action, triggered: Vec<ArmId>, outcomes: BTreeMap<ArmId, f64>) -> Self {
        OfflineRecord {
            action,
            triggered,
            outcomes,
        }
    }

    /// Checks the record against an arm count. `index` is only used to label
    /// the error.
    pub fn validate(&self, index: usize, m: usize) -> Result<()> {
        let bad = |reason: String| CoreError::MalformedRecord { index, reason };
        self.action.check_range(m).map_err(|e| bad(e.to_string()))?;
        let mut seen = BTreeSet::new();
        for &t in &self.triggered {
            if t.0 >= m {
                return Err(bad(format!("triggered arm {t} out of range for {m} arms")));
            }
            if !seen.insert(t) {
                return Err(bad(format!("triggered arm {t} listed twice")));
            }
        }
        for (&arm, &x) in &self.outcomes {
            if !seen.contains(&arm) {
                return Err(bad(format!("outcome for arm {arm} which was not triggered")));
            }
            if !(0.0..=1.0).contains(&x) {
                return Err(bad(format!("outcome {x} for arm {arm} outside [0,1]")));
            }
        }
        if let Some(t) = self.triggered.iter().find(|t| !self.outcomes.contains_key(t)) {
            return Err(bad(format!("triggered arm {t} has no outcome")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    m: usize,
    records: Vec<OfflineRecord>,
}

impl Dataset {
    /// Builds a dataset, validating every record.
    pub fn new(m: usize, records: Vec<OfflineRecord>) -> Result<Self> {
        for (i, r) in records.iter().enumerate() {
            r.validate(i, m)?;
        }
        Ok(Dataset { m, records })
    }

    pub fn empty(m: usize) -> Self {
        Dataset {
            m,
            records: Vec::new(),
        }
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

    pub fn records(&self) -> &[OfflineRecord] {
        &self.records
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for r in &self.records {
            let line = serde_json::to_string(r).map_err(|e| CoreError::Io(e.to_string()))?;
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn to_jsonl_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }

    /// Reads JSON lines. When `m` is `None` the arm count is inferred as one
    /// past the largest arm referenced.
    pub fn read_jsonl<R: BufRead>(reader: R, m: Option<usize>) -> Result<Self> {
        let mut records = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: OfflineRecord = serde_json::from_str(&line).map_err(|e| CoreError::Parse {
                line: i + 1,
                reason: e.to_string(),
            })?;
            records.push(rec);
        }
        let m = m.unwrap_or_else(|| {
            records
                .iter()
                .flat_map(|r| r.action.members().iter().chain(r.triggered.iter()))
                .map(|a| a.0 + 1)
                .max()
                .unwrap_or(0)
        });
        Dataset::new(m, records)
    }

    /// Content hash, used to confirm that paired algorithms saw the same data.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.m.hash(&mut h);
        self.to_jsonl_string().hash(&mut h);
        h.finish()
    }
}
