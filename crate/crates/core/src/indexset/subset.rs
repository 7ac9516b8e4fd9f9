use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::{IndexElem, IndexPoset, Key, Poset};

/// A subset of an index poset, given by a membership test.
#[derive(Clone)]
pub enum Subset {
    /// Even naturals.
    Evens,
    /// Naturals `>= n`.
    AtLeast(u64),
    Keys(BTreeSet<Key>),
    Predicate {
        name: String,
        test: Arc<dyn Fn(&Key) -> bool + Send + Sync>,
    },
}

impl Subset {
    pub fn keys(keys: impl IntoIterator<Item = Key>) -> Self {
        Subset::Keys(keys.into_iter().collect())
    }

    pub fn predicate(name: impl Into<String>, test: impl Fn(&Key) -> bool + Send + Sync + 'static) -> Self {
        Subset::Predicate {
            name: name.into(),
            test: Arc::new(test),
        }
    }

    pub fn contains(&self, key: &Key) -> bool {
        match self {
            Subset::Evens => key.as_nat().is_some_and(|n| n % 2 == 0),
            Subset::AtLeast(m) => key.as_nat().is_some_and(|n| n >= *m),
            Subset::Keys(set) => set.contains(key),
            Subset::Predicate { test, .. } => test(key),
        }
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subset::Evens => f.write_str("evens"),
            Subset::AtLeast(n) => write!(f, "ge:{n}"),
            Subset::Keys(set) => write!(f, "keys:{}", Key::Set(set.iter().cloned().collect())),
            Subset::Predicate { name, .. } => write!(f, "pred:{name}"),
        }
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subset({self})")
    }
}

impl FromStr for Subset {
    type Err = String;

    /// `evens`, `ge:N`, or `keys:{k1,k2,...}`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "evens" {
            return Ok(Subset::Evens);
        }
        if let Some(n) = s.strip_prefix("ge:") {
            return n
                .trim()
                .parse()
                .map(Subset::AtLeast)
                .map_err(|e| format!("bad subset bound {n:?}: {e}"));
        }
        if let Some(body) = s.strip_prefix("keys:") {
            let set: Key = body.parse().map_err(|e| format!("{e}"))?;
            return match set {
                Key::Set(members) => Ok(Subset::keys(members)),
                _ => Err("keys: expects a set literal such as {1,3,5}".into()),
            };
        }
        Err(format!("unknown subset {s:?} (expected evens, ge:N or keys:{{...}})"))
    }
}

/// The restriction of a poset to a subset, ranks inherited.
#[derive(Debug, Clone)]
pub struct SubPoset {
    base: IndexPoset,
    subset: Subset,
}

impl SubPoset {
    pub fn new(base: IndexPoset, subset: Subset) -> Self {
        SubPoset { base, subset }
    }
}

impl Poset for SubPoset {
    fn describe(&self) -> String {
        format!("{}|{}", self.base.describe(), self.subset)
    }

    fn is_finite(&self) -> bool {
        self.base.is_finite() || matches!(self.subset, Subset::Keys(_))
    }

    fn max_rank(&self) -> Option<usize> {
        match &self.subset {
            Subset::Keys(set) => set.iter().filter_map(|k| self.base.rank(k)).max(),
            _ => self.base.max_rank(),
        }
    }

    fn rank(&self, key: &Key) -> Option<usize> {
        if self.subset.contains(key) {
            self.base.rank(key)
        } else {
            None
        }
    }

    fn leq(&self, a: &Key, b: &Key) -> bool {
        self.subset.contains(a) && self.subset.contains(b) && self.base.leq(a, b)
    }

    fn window(&self, horizon: usize) -> Vec<IndexElem> {
        self.base
            .window(horizon)
            .into_iter()
            .filter(|e| self.subset.contains(&e.key))
            .collect()
    }

    fn predecessors(&self, key: &Key) -> Option<Vec<Key>> {
        if !self.subset.contains(key) {
            return None;
        }
        Some(
            self.base
                .predecessors(key)?
                .into_iter()
                .filter(|k| self.subset.contains(k))
                .collect(),
        )
    }

    fn is_antisymmetric(&self) -> bool {
        self.base.is_antisymmetric()
    }
}
