use super::{IndexElem, Key, Poset};

/// The natural numbers `0 <= 1 <= 2 <= ...`, rank `n` for `n`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Nat;

impl Poset for Nat {
    fn describe(&self) -> String {
        "nat".into()
    }

    fn is_finite(&self) -> bool {
        false
    }

    fn max_rank(&self) -> Option<usize> {
        None
    }

    fn rank(&self, key: &Key) -> Option<usize> {
        key.as_nat().map(|n| n as usize)
    }

    fn leq(&self, a: &Key, b: &Key) -> bool {
        matches!((a.as_nat(), b.as_nat()), (Some(x), Some(y)) if x <= y)
    }

    fn window(&self, horizon: usize) -> Vec<IndexElem> {
        (0..=horizon)
            .map(|n| IndexElem {
                key: Key::Nat(n as u64),
                rank: n,
            })
            .collect()
    }

    fn predecessors(&self, key: &Key) -> Option<Vec<Key>> {
        let n = key.as_nat()?;
        Some((0..n).map(Key::Nat).collect())
    }

    fn is_antisymmetric(&self) -> bool {
        true
    }
}

/// `N x N` with the product order; `(i,j)` has rank `max(i,j)` and a layer
/// is listed lexicographically.
#[derive(Debug, Clone, Copy, Default)]
pub struct NatSquare;

fn nat_pair(k: &Key) -> Option<(u64, u64)> {
    let (a, b) = k.as_pair()?;
    Some((a.as_nat()?, b.as_nat()?))
}

impl Poset for NatSquare {
    fn describe(&self) -> String {
        "nat_square".into()
    }

    fn is_finite(&self) -> bool {
        false
    }

    fn max_rank(&self) -> Option<usize> {
        None
    }

    fn rank(&self, key: &Key) -> Option<usize> {
        nat_pair(key).map(|(i, j)| i.max(j) as usize)
    }

    fn leq(&self, a: &Key, b: &Key) -> bool {
        match (nat_pair(a), nat_pair(b)) {
            (Some((i, j)), Some((k, l))) => i <= k && j <= l,
            _ => false,
        }
    }

    fn window(&self, horizon: usize) -> Vec<IndexElem> {
        let mut out = Vec::with_capacity((horizon + 1) * (horizon + 1));
        for r in 0..=horizon as u64 {
            let mut layer: Vec<(u64, u64)> = (0..=r).map(|i| (i, r)).chain((0..r).map(|j| (r, j))).collect();
            layer.sort_unstable();
            out.extend(layer.into_iter().map(|(i, j)| IndexElem {
                key: Key::pair(Key::Nat(i), Key::Nat(j)),
                rank: r as usize,
            }));
        }
        out
    }

    fn predecessors(&self, key: &Key) -> Option<Vec<Key>> {
        let (i, j) = nat_pair(key)?;
        let mut out = Vec::new();
        for x in 0..=i {
            for y in 0..=j {
                if (x, y) != (i, j) {
                    out.push(Key::pair(Key::Nat(x), Key::Nat(y)));
                }
            }
        }
        Some(out)
    }

    fn is_antisymmetric(&self) -> bool {
        true
    }
}
