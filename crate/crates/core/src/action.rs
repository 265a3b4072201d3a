//! Base arms and combinatorial actions.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Index of a base arm in `[0, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArmId(pub usize);

impl ArmId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for ArmId {
    fn from(i: usize) -> Self {
        ArmId(i)
    }
}

impl fmt::Display for ArmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ActionKind {
    #[serde(rename = "list")]
    OrderedList,
    #[serde(rename = "set")]
    Set,
}

/// A combinatorial action (super arm).
///
/// Set members are kept sorted ascending so that two sets with the same
/// members compare equal. List members keep their ranked order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawAction", into = "RawAction")]
pub struct Action {
    kind: ActionKind,
    members: Vec<ArmId>,
}

#[derive(Serialize, Deserialize)]
struct RawAction {
    kind: ActionKind,
    members: Vec<usize>,
}

impl TryFrom<RawAction> for Action {
    type Error = CoreError;

    fn try_from(raw: RawAction) -> Result<Self> {
        Action::new(raw.kind, raw.members.into_iter().map(ArmId).collect())
    }
}

impl From<Action> for RawAction {
    fn from(a: Action) -> Self {
        RawAction {
            kind: a.kind,
            members: a.members.iter().map(|m| m.0).collect(),
        }
    }
}

impl Action {
    pub fn new(kind: ActionKind, mut members: Vec<ArmId>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &a in &members {
            if !seen.insert(a) {
                return Err(CoreError::DuplicateArm(a.0));
            }
        }
        if kind == ActionKind::Set {
            members.sort_unstable();
        }
        Ok(Action { kind, members })
    }

    pub fn list<I: IntoIterator<Item = usize>>(members: I) -> Result<Self> {
        Self::new(
            ActionKind::OrderedList,
            members.into_iter().map(ArmId).collect(),
        )
    }

    pub fn set<I: IntoIterator<Item = usize>>(members: I) -> Result<Self> {
        Self::new(ActionKind::Set, members.into_iter().map(ArmId).collect())
    }

    pub fn empty_set() -> Self {
        Action {
            kind: ActionKind::Set,
            members: Vec::new(),
        }
    }

    pub fn kind(&self) -> ActionKind {
        self.kind
    }

    pub fn members(&self) -> &[ArmId] {
        &self.members
    }

    pub fn indices(&self) -> Vec<usize> {
        self.members.iter().map(|a| a.0).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, arm: ArmId) -> bool {
        match self.kind {
            ActionKind::Set => self.members.binary_search(&arm).is_ok(),
            ActionKind::OrderedList => self.members.contains(&arm),
        }
    }

    /// Rejects any member `>= m`.
    pub fn check_range(&self, m: usize) -> Result<()> {
        match self.members.iter().find(|a| a.0 >= m) {
            Some(a) => Err(CoreError::ArmOutOfRange { arm: a.0, m }),
            None => Ok(()),
        }
    }

    /// The same members viewed as an unordered set.
    pub fn to_set(&self) -> Action {
        let mut members = self.members.clone();
        members.sort_unstable();
        Action {
            kind: ActionKind::Set,
            members,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (open, close) = match self.kind {
            ActionKind::OrderedList => ('(', ')'),
            ActionKind::Set => ('{', '}'),
        };
        write!(f, "{open}")?;
        for (i, a) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "{close}")
    }
}
