use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::{IndexElem, IndexPoset, Key, Poset};

/// A partial function between index sets.
pub type KeyFn = Arc<dyn Fn(&Key) -> Option<Key> + Send + Sync>;

/// `{(a,b) | f(b) <= a}` inside `A x B`, ordered componentwise.
///
/// `(a,b)` has rank `max(rank a, rank b)`; a layer is listed by the
/// positions of `a` in `A` and then of `b` in `B`.
#[derive(Clone)]
pub struct PairPoset {
    a: IndexPoset,
    b: IndexPoset,
    f: KeyFn,
    f_name: String,
}

impl fmt::Debug for PairPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

impl PairPoset {
    pub fn new(a: IndexPoset, b: IndexPoset, f: KeyFn, f_name: impl Into<String>) -> Self {
        PairPoset {
            a,
            b,
            f,
            f_name: f_name.into(),
        }
    }

    fn split<'k>(&self, key: &'k Key) -> Option<(&'k Key, &'k Key)> {
        let (x, y) = key.as_pair()?;
        let fy = (self.f)(y)?;
        if self.a.contains(x) && self.b.contains(y) && self.a.leq(&fy, x) {
            Some((x, y))
        } else {
            None
        }
    }
}

impl Poset for PairPoset {
    fn describe(&self) -> String {
        format!(
            "pairs({},{},{})",
            self.a.describe(),
            self.b.describe(),
            self.f_name
        )
    }

    fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite()
    }

    fn max_rank(&self) -> Option<usize> {
        Some(self.a.max_rank()?.max(self.b.max_rank()?))
    }

    fn rank(&self, key: &Key) -> Option<usize> {
        let (x, y) = self.split(key)?;
        Some(self.a.rank(x)?.max(self.b.rank(y)?))
    }

    fn leq(&self, p: &Key, q: &Key) -> bool {
        match (self.split(p), self.split(q)) {
            (Some((a1, b1)), Some((a2, b2))) => self.a.leq(a1, a2) && self.b.leq(b1, b2),
            _ => false,
        }
    }

    fn window(&self, horizon: usize) -> Vec<IndexElem> {
        let aw = self.a.window(horizon);
        let bw = self.b.window(horizon);
        let images: HashMap<usize, Key> = bw
            .iter()
            .enumerate()
            .filter_map(|(j, e)| (self.f)(&e.key).map(|k| (j, k)))
            .collect();
        let mut out = Vec::new();
        for (i, x) in aw.iter().enumerate() {
            for (j, y) in bw.iter().enumerate() {
                if let Some(fy) = images.get(&j) {
                    if self.a.leq(fy, &x.key) {
                        out.push(((x.rank.max(y.rank), i, j), IndexElem {
                            key: Key::pair(x.key.clone(), y.key.clone()),
                            rank: x.rank.max(y.rank),
                        }));
                    }
                }
            }
        }
        out.sort_by_key(|p| p.0);
        out.into_iter().map(|(_, e)| e).collect()
    }

    fn predecessors(&self, key: &Key) -> Option<Vec<Key>> {
        let (x, y) = self.split(key)?;
        let mut xs = self.a.predecessors(x)?;
        xs.push(x.clone());
        let mut ys = self.b.predecessors(y)?;
        ys.push(y.clone());
        let mut out = Vec::new();
        for a in &xs {
            for b in &ys {
                if a == x && b == y {
                    continue;
                }
                let candidate = Key::pair(a.clone(), b.clone());
                if self.split(&candidate).is_some() {
                    out.push(candidate);
                }
            }
        }
        Some(out)
    }

    fn is_antisymmetric(&self) -> bool {
        self.a.is_antisymmetric() && self.b.is_antisymmetric()
    }
}
