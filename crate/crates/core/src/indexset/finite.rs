use std::collections::HashMap;

use super::{IndexElem, Key, Poset};
use crate::error::{Error, Result};

/// An explicitly listed finite preorder.
///
/// The declared pairs are closed under reflexivity and transitivity on
/// construction. Rank is the height of an element (length of the longest
/// strictly increasing chain ending at it); inside a rank layer elements keep
/// their declaration order.
#[derive(Debug, Clone)]
pub struct FinitePoset {
    elements: Vec<Key>,
    position: HashMap<Key, usize>,
    leq: Vec<Vec<bool>>,
    ranks: Vec<usize>,
    order: Vec<usize>,
    antisymmetric: bool,
}

impl FinitePoset {
    pub fn new(elements: Vec<Key>, pairs: &[(Key, Key)]) -> Result<Self> {
        let n = elements.len();
        let mut position = HashMap::with_capacity(n);
        for (i, k) in elements.iter().enumerate() {
            if position.insert(k.clone(), i).is_some() {
                return Err(Error::Precondition(format!("duplicate element {k}")));
            }
        }
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in pairs {
            let ia = *position
                .get(a)
                .ok_or_else(|| Error::Precondition(format!("unknown element {a}")))?;
            let ib = *position
                .get(b)
                .ok_or_else(|| Error::Precondition(format!("unknown element {b}")))?;
            leq[ia][ib] = true;
        }
        // Warshall
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        let antisymmetric = (0..n).all(|i| (0..n).all(|j| i == j || !(leq[i][j] && leq[j][i])));

        let mut ranks: Vec<Option<usize>> = vec![None; n];
        fn height(i: usize, leq: &[Vec<bool>], memo: &mut [Option<usize>]) -> usize {
            if let Some(h) = memo[i] {
                return h;
            }
            let mut best = 0;
            for j in 0..leq.len() {
                if leq[j][i] && !leq[i][j] {
                    best = best.max(height(j, leq, memo) + 1);
                }
            }
            memo[i] = Some(best);
            best
        }
        for i in 0..n {
            height(i, &leq, &mut ranks);
        }
        let ranks: Vec<usize> = ranks.into_iter().map(|r| r.unwrap_or(0)).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (ranks[i], i));

        Ok(FinitePoset {
            elements,
            position,
            leq,
            ranks,
            order,
            antisymmetric,
        })
    }

    pub fn chain(keys: Vec<Key>) -> Self {
        let pairs: Vec<(Key, Key)> = keys.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
        FinitePoset::new(keys, &pairs).expect("chain keys must be distinct")
    }

    pub fn elements(&self) -> &[Key] {
        &self.elements
    }

    /// Related pairs `a <= b` with `a != b`, in declaration order.
    pub fn strict_pairs(&self) -> Vec<(Key, Key)> {
        let n = self.elements.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && self.leq[i][j] {
                    out.push((self.elements[i].clone(), self.elements[j].clone()));
                }
            }
        }
        out
    }
}

impl Poset for FinitePoset {
    fn describe(&self) -> String {
        let elems: Vec<String> = self.elements.iter().map(|k| k.to_string()).collect();
        let pairs: Vec<String> = self
            .strict_pairs()
            .iter()
            .map(|(a, b)| format!("{a}<={b}"))
            .collect();
        format!("finite[{}|{}]", elems.join(","), pairs.join(","))
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn max_rank(&self) -> Option<usize> {
        Some(self.ranks.iter().copied().max().unwrap_or(0))
    }

    fn rank(&self, key: &Key) -> Option<usize> {
        self.position.get(key).map(|&i| self.ranks[i])
    }

    fn leq(&self, a: &Key, b: &Key) -> bool {
        match (self.position.get(a), self.position.get(b)) {
            (Some(&i), Some(&j)) => self.leq[i][j],
            _ => false,
        }
    }

    fn window(&self, horizon: usize) -> Vec<IndexElem> {
        self.order
            .iter()
            .filter(|&&i| self.ranks[i] <= horizon)
            .map(|&i| IndexElem {
                key: self.elements[i].clone(),
                rank: self.ranks[i],
            })
            .collect()
    }

    fn predecessors(&self, key: &Key) -> Option<Vec<Key>> {
        let &i = self.position.get(key)?;
        Some(
            self.order
                .iter()
                .filter(|&&j| j != i && self.leq[j][i])
                .map(|&j| self.elements[j].clone())
                .collect(),
        )
    }

    fn is_antisymmetric(&self) -> bool {
        self.antisymmetric
    }
}
