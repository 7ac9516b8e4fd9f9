use std::collections::HashMap;

use super::{IndexElem, IndexPoset, Key, Poset};

/// Finite nonempty subsets of an antisymmetric base that have a maximum,
/// ordered by inclusion.
///
/// An element has the rank of its maximum in the base. Inside a layer the
/// order is by cardinality, then by the base enumeration positions of the
/// members. Windows are exponential in the size of the base window.
#[derive(Debug, Clone)]
pub struct MardesicPoset {
    base: IndexPoset,
}

impl MardesicPoset {
    /// Callers check antisymmetry; see [`super::mardesic`].
    pub(crate) fn new(base: IndexPoset) -> Self {
        MardesicPoset { base }
    }

    pub fn base(&self) -> &IndexPoset {
        &self.base
    }
}

/// The unique member `m` of `members` with `x <= m` for every member `x`.
pub fn max_of(base: &IndexPoset, members: &[Key]) -> Option<Key> {
    let mut found: Option<&Key> = None;
    for m in members {
        if members.iter().all(|x| base.leq(x, m)) {
            if found.is_some() {
                return None;
            }
            found = Some(m);
        }
    }
    found.cloned()
}

impl Poset for MardesicPoset {
    fn describe(&self) -> String {
        format!("mardesic_of({})", self.base.describe())
    }

    fn is_finite(&self) -> bool {
        self.base.is_finite()
    }

    fn max_rank(&self) -> Option<usize> {
        self.base.max_rank()
    }

    fn rank(&self, key: &Key) -> Option<usize> {
        let members = key.as_set()?;
        if members.is_empty() || !members.iter().all(|m| self.base.contains(m)) {
            return None;
        }
        let top = max_of(&self.base, members)?;
        self.base.rank(&top)
    }

    fn leq(&self, a: &Key, b: &Key) -> bool {
        if self.rank(a).is_none() || self.rank(b).is_none() {
            return false;
        }
        let (xs, ys) = (a.as_set().unwrap_or(&[]), b.as_set().unwrap_or(&[]));
        xs.iter().all(|x| ys.binary_search(x).is_ok())
    }

    fn window(&self, horizon: usize) -> Vec<IndexElem> {
        let base_window = self.base.window(horizon);
        let position: HashMap<&Key, usize> =
            base_window.iter().enumerate().map(|(i, e)| (&e.key, i)).collect();
        let mut entries: Vec<((usize, usize, Vec<usize>), IndexElem)> = Vec::new();
        for top in &base_window {
            let below: Vec<&Key> = base_window
                .iter()
                .filter(|e| e.key != top.key && self.base.leq(&e.key, &top.key))
                .map(|e| &e.key)
                .collect();
            assert!(below.len() < 63, "mardesic window too large to enumerate");
            for mask in 0u64..(1u64 << below.len()) {
                let mut members: Vec<Key> = vec![top.key.clone()];
                members.extend(
                    below
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, k)| (*k).clone()),
                );
                let mut positions: Vec<usize> = members.iter().map(|m| position[m]).collect();
                positions.sort_unstable();
                let key = Key::set(members);
                entries.push((
                    (top.rank, positions.len(), positions),
                    IndexElem { key, rank: top.rank },
                ));
            }
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        entries.into_iter().map(|(_, e)| e).collect()
    }

    fn predecessors(&self, key: &Key) -> Option<Vec<Key>> {
        self.rank(key)?;
        let members = key.as_set()?;
        assert!(members.len() < 63, "mardesic element too large");
        let full = (1u64 << members.len()) - 1;
        let mut out = Vec::new();
        for mask in 1..full {
            let sub: Vec<Key> = members
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, k)| k.clone())
                .collect();
            if max_of(&self.base, &sub).is_some() {
                out.push(Key::Set(sub));
            }
        }
        Some(out)
    }

    fn is_antisymmetric(&self) -> bool {
        true
    }
}
