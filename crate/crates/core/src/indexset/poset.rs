use std::fmt;
use std::sync::Arc;

use super::Key;
use crate::verdict::Mode;

/// An index element together with its enumeration layer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct IndexElem {
    pub key: Key,
    pub rank: usize,
}

/// A directed preordered index set, presented through finite windows.
///
/// Implementations must keep `window(h)` a prefix of `window(h + 1)`: the
/// order is rank-major and the order inside a rank layer never changes.
/// Ranks must be monotone (`a <= b` implies `rank(a) <= rank(b)`), so every
/// window is a down-set.
pub trait Poset: Send + Sync + fmt::Debug {
    fn describe(&self) -> String;

    fn is_finite(&self) -> bool;

    /// Largest rank of any element; `None` for infinite posets.
    fn max_rank(&self) -> Option<usize>;

    /// `None` when `key` is not an element.
    fn rank(&self, key: &Key) -> Option<usize>;

    fn leq(&self, a: &Key, b: &Key) -> bool;

    /// All elements of rank at most `horizon` in enumeration order.
    fn window(&self, horizon: usize) -> Vec<IndexElem>;

    /// Strict predecessors `{x | x <= a, x != a}`, or `None` if the poset
    /// cannot enumerate them.
    fn predecessors(&self, key: &Key) -> Option<Vec<Key>>;

    /// Whether the order is known to be antisymmetric.
    fn is_antisymmetric(&self) -> bool;
}

/// Shared handle on a [`Poset`].
#[derive(Clone)]
pub struct IndexPoset(Arc<dyn Poset>);

impl fmt::Debug for IndexPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IndexPoset({})", self.0.describe())
    }
}

impl IndexPoset {
    pub fn new(poset: impl Poset + 'static) -> Self {
        IndexPoset(Arc::new(poset))
    }

    pub fn describe(&self) -> String {
        self.0.describe()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn max_rank(&self) -> Option<usize> {
        self.0.max_rank()
    }

    pub fn rank(&self, key: &Key) -> Option<usize> {
        self.0.rank(key)
    }

    pub fn contains(&self, key: &Key) -> bool {
        self.0.rank(key).is_some()
    }

    pub fn leq(&self, a: &Key, b: &Key) -> bool {
        self.0.leq(a, b)
    }

    /// `a <= b` and not `b <= a`.
    pub fn lt(&self, a: &Key, b: &Key) -> bool {
        self.0.leq(a, b) && !self.0.leq(b, a)
    }

    pub fn window(&self, horizon: usize) -> Vec<IndexElem> {
        self.0.window(horizon)
    }

    pub fn window_keys(&self, horizon: usize) -> Vec<Key> {
        self.0.window(horizon).into_iter().map(|e| e.key).collect()
    }

    pub fn predecessors(&self, key: &Key) -> Option<Vec<Key>> {
        self.0.predecessors(key)
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.0.is_antisymmetric()
    }

    /// True when `window(horizon)` is the whole poset.
    pub fn window_complete(&self, horizon: usize) -> bool {
        self.0.is_finite() && self.0.max_rank().is_none_or(|m| m <= horizon)
    }

    pub fn mode(&self, horizon: usize) -> Mode {
        if self.window_complete(horizon) {
            Mode::Exact
        } else {
            Mode::Windowed { horizon }
        }
    }

    /// The same underlying poset (by identity, else by description).
    pub fn same(&self, other: &IndexPoset) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.describe() == other.describe()
    }

    /// Within `window(horizon)`, whether every element is `>=` all others
    /// that precede it, i.e. the window is a chain in enumeration order.
    pub fn window_is_chain(&self, horizon: usize) -> bool {
        let w = self.window_keys(horizon);
        w.windows(2).all(|p| self.leq(&p[0], &p[1]))
    }
}
