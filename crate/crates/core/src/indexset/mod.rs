//! Directed preordered index sets and order-theoretic constructions.
//!
//! Infinite index sets are only ever inspected through `window(H)`, the
//! finite set of elements of rank at most `H`. Every verdict produced here
//! records whether it is exact (the window is the whole poset) or windowed.

mod finite;
mod key;
mod mardesic;
mod nat;
mod pairs;
mod poset;
mod subset;

pub use finite::FinitePoset;
pub use key::{Key, KeyParseError};
pub use mardesic::{max_of, MardesicPoset};
pub use nat::{Nat, NatSquare};
pub use pairs::{KeyFn, PairPoset};
pub use poset::{IndexElem, IndexPoset, Poset};
pub use subset::{SubPoset, Subset};

use crate::error::{Error, Result};
use crate::verdict::{Verdict, Witness};

impl IndexPoset {
    pub fn nat() -> Self {
        IndexPoset::new(Nat)
    }

    pub fn nat_square() -> Self {
        IndexPoset::new(NatSquare)
    }

    pub fn finite(elements: Vec<Key>, pairs: &[(Key, Key)]) -> Result<Self> {
        Ok(IndexPoset::new(FinitePoset::new(elements, pairs)?))
    }

    /// A finite chain in the given order.
    pub fn chain(keys: Vec<Key>) -> Self {
        IndexPoset::new(FinitePoset::chain(keys))
    }

    pub fn antichain(keys: Vec<Key>) -> Result<Self> {
        IndexPoset::finite(keys, &[])
    }

    pub fn restrict_to(&self, subset: Subset) -> Self {
        IndexPoset::new(SubPoset::new(self.clone(), subset))
    }

    pub fn pairs(a: IndexPoset, b: IndexPoset, f: KeyFn, f_name: impl Into<String>) -> Self {
        IndexPoset::new(PairPoset::new(a, b, f, f_name))
    }
}

/// Elements of rank at most `horizon`, rank-major.
pub fn enumerate_window(poset: &IndexPoset, horizon: usize) -> Vec<IndexElem> {
    poset.window(horizon)
}

/// First element of `window(horizon)` above both `a` and `b`.
pub fn upper_bound(poset: &IndexPoset, a: &Key, b: &Key, horizon: usize) -> Option<IndexElem> {
    poset
        .window(horizon)
        .into_iter()
        .find(|e| poset.leq(a, &e.key) && poset.leq(b, &e.key))
}

/// First key of `window` above every key in `lows`.
pub(crate) fn first_upper_bound<'w>(
    poset: &IndexPoset,
    window: &'w [Key],
    lows: &[&Key],
) -> Option<&'w Key> {
    window
        .iter()
        .find(|c| lows.iter().all(|l| poset.leq(l, c)))
}

/// Every pair of the window has an upper bound in the window.
///
/// Witnesses are `(a, b) -> ub`. A missing bound refutes directedness only
/// when the window is the whole poset; otherwise the verdict is
/// inconclusive.
pub fn is_directed(poset: &IndexPoset, horizon: usize) -> Verdict {
    let mode = poset.mode(horizon);
    let w = poset.window_keys(horizon);
    let mut witnesses = Vec::new();
    for (i, a) in w.iter().enumerate() {
        for b in &w[i..] {
            match first_upper_bound(poset, &w, &[a, b]) {
                Some(ub) => witnesses.push(Witness::new(vec![a.clone(), b.clone()], vec![ub.clone()])),
                None if mode.is_exact() => {
                    return Verdict::fails(mode, vec![a.clone(), b.clone()], "no upper bound");
                }
                None => {
                    return Verdict::inconclusive(
                        mode,
                        vec![a.clone(), b.clone()],
                        "no upper bound inside the window",
                    );
                }
            }
        }
    }
    Verdict::holds(mode, witnesses)
}

/// Every element of the window lies below some member of `subset` that is
/// also in the window.
pub fn is_cofinal(poset: &IndexPoset, subset: &Subset, horizon: usize) -> Verdict {
    let mode = poset.mode(horizon);
    let w = poset.window_keys(horizon);
    let members: Vec<&Key> = w.iter().filter(|k| subset.contains(k)).collect();
    let mut witnesses = Vec::with_capacity(w.len());
    for a in &w {
        match members.iter().find(|s| poset.leq(a, s)) {
            Some(s) => witnesses.push(Witness::new(vec![a.clone()], vec![(*s).clone()])),
            None if mode.is_exact() => {
                return Verdict::fails(mode, vec![a.clone()], "not below any subset member");
            }
            None => {
                return Verdict::inconclusive(
                    mode,
                    vec![a.clone()],
                    "no subset member above it inside the window",
                );
            }
        }
    }
    Verdict::holds(mode, witnesses)
}

/// Every element of the window has a finite, enumerable predecessor set.
/// Witnesses list the predecessors of each element.
pub fn is_cofinite(poset: &IndexPoset, horizon: usize) -> Result<Verdict> {
    let mode = poset.mode(horizon);
    let mut witnesses = Vec::new();
    for a in poset.window_keys(horizon) {
        let preds = poset.predecessors(&a).ok_or_else(|| {
            Error::Unsupported(format!("predecessors of {a} in {}", poset.describe()))
        })?;
        witnesses.push(Witness::new(vec![a], preds));
    }
    Ok(Verdict::holds(mode, witnesses))
}

/// Every related pair of the window is equal or strictly ordered.
pub fn is_antisymmetric(poset: &IndexPoset, horizon: usize) -> Verdict {
    let mode = poset.mode(horizon);
    let w = poset.window_keys(horizon);
    for (i, a) in w.iter().enumerate() {
        for b in &w[i + 1..] {
            if poset.leq(a, b) && poset.leq(b, a) {
                return Verdict::fails(mode, vec![a.clone(), b.clone()], "a <= b <= a with a != b");
            }
        }
    }
    Verdict::holds(mode, Vec::new())
}

/// The poset of finite subsets having a maximum, ordered by inclusion.
pub fn mardesic(poset: &IndexPoset) -> Result<IndexPoset> {
    if !poset.is_antisymmetric() {
        return Err(Error::Precondition(format!(
            "{} is not antisymmetric",
            poset.describe()
        )));
    }
    Ok(IndexPoset::new(MardesicPoset::new(poset.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verdict::{Mode, Status};

    fn k(s: &str) -> Key {
        s.parse().unwrap()
    }

    fn keys(v: &[IndexElem]) -> Vec<String> {
        v.iter().map(|e| e.key.to_string()).collect()
    }

    fn chain123() -> IndexPoset {
        IndexPoset::chain(vec![k("1"), k("2"), k("3")])
    }

    #[test]
    fn window_examples() {
        assert_eq!(keys(&enumerate_window(&IndexPoset::nat(), 3)), ["0", "1", "2", "3"]);
        assert_eq!(keys(&enumerate_window(&chain123(), 10)), ["1", "2", "3"]);
        let m = mardesic(&chain123()).unwrap();
        assert_eq!(enumerate_window(&m, 100).len(), 7);
        assert_eq!(enumerate_window(&m, 100), enumerate_window(&m, 100));
    }

    #[test]
    fn windows_are_prefixes() {
        let posets = [
            IndexPoset::nat(),
            IndexPoset::nat_square(),
            mardesic(&IndexPoset::nat()).unwrap(),
        ];
        for p in posets {
            for h in 0..5 {
                let small = p.window(h);
                let big = p.window(h + 1);
                assert_eq!(&big[..small.len()], &small[..], "{}", p.describe());
            }
        }
    }

    #[test]
    fn directedness_examples() {
        let v = is_directed(&chain123(), 5);
        assert_eq!(v.status, Status::Holds);
        assert!(v.mode.is_exact());

        let anti = IndexPoset::antichain(vec![k("a"), k("b")]).unwrap();
        let v = is_directed(&anti, 5);
        assert!(v.is_fails() && v.mode.is_exact());
        assert_eq!(v.counterexample.unwrap().elements, vec![k("a"), k("b")]);

        let sq = IndexPoset::nat_square();
        let v = is_directed(&sq, 5);
        assert!(v.is_holds());
        assert_eq!(v.mode, Mode::Windowed { horizon: 5 });
        // the witness is the componentwise max
        for w in &v.witnesses {
            let (a, b) = (w.at[0].as_pair().unwrap(), w.at[1].as_pair().unwrap());
            let ub = Key::pair(
                Key::Nat(a.0.as_nat().unwrap().max(b.0.as_nat().unwrap())),
                Key::Nat(a.1.as_nat().unwrap().max(b.1.as_nat().unwrap())),
            );
            assert_eq!(w.chosen[0], ub);
        }
    }

    #[test]
    fn cofinality_examples() {
        let nat = IndexPoset::nat();
        assert!(is_cofinal(&nat, &Subset::Evens, 10).is_holds());
        assert!(is_cofinal(&nat, &Subset::AtLeast(5), 20).is_holds());
        // odd top element has its even successor outside the window
        assert!(is_cofinal(&nat, &Subset::Evens, 11).is_inconclusive());

        let v = is_cofinal(&chain123(), &Subset::keys([k("2")]), 10);
        assert!(v.is_fails() && v.mode.is_exact());
        assert_eq!(v.counterexample.unwrap().elements, vec![k("3")]);
    }

    #[test]
    fn cofinite_examples() {
        let v = is_cofinite(&IndexPoset::nat(), 6).unwrap();
        assert!(v.is_holds());
        for w in &v.witnesses {
            assert_eq!(w.chosen.len() as u64, w.at[0].as_nat().unwrap());
        }
        let m = mardesic(&IndexPoset::nat()).unwrap();
        let preds = m.predecessors(&k("{0,3}")).unwrap();
        assert_eq!(preds, vec![k("{0}"), k("{3}")]);
        assert!(is_cofinite(&chain123(), 10).unwrap().holds_exactly());
        assert!(!is_cofinite(&chain123(), 0).unwrap().holds_exactly());
    }

    #[derive(Debug)]
    struct Opaque;
    impl Poset for Opaque {
        fn describe(&self) -> String {
            "opaque".into()
        }
        fn is_finite(&self) -> bool {
            false
        }
        fn max_rank(&self) -> Option<usize> {
            None
        }
        fn rank(&self, key: &Key) -> Option<usize> {
            Nat.rank(key)
        }
        fn leq(&self, a: &Key, b: &Key) -> bool {
            Nat.leq(a, b)
        }
        fn window(&self, horizon: usize) -> Vec<IndexElem> {
            Nat.window(horizon)
        }
        fn predecessors(&self, _: &Key) -> Option<Vec<Key>> {
            None
        }
        fn is_antisymmetric(&self) -> bool {
            true
        }
    }

    #[test]
    fn cofinite_needs_predecessors() {
        let err = is_cofinite(&IndexPoset::new(Opaque), 3).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }

    #[test]
    fn mardesic_examples() {
        let single = IndexPoset::chain(vec![k("a")]);
        assert_eq!(keys(&mardesic(&single).unwrap().window(9)), ["{a}"]);

        // a <= c, b <= c, a and b incomparable
        let vee = IndexPoset::finite(
            vec![k("a"), k("b"), k("c")],
            &[(k("a"), k("c")), (k("b"), k("c"))],
        )
        .unwrap();
        let m = mardesic(&vee).unwrap();
        let w = keys(&m.window(9));
        assert_eq!(w.len(), 6);
        assert!(!w.contains(&"{a,b}".to_string()));
        assert!(w.contains(&"{a,b,c}".to_string()));

        let cyc = IndexPoset::finite(vec![k("x"), k("y")], &[(k("x"), k("y")), (k("y"), k("x"))]).unwrap();
        assert!(matches!(mardesic(&cyc), Err(Error::Precondition(_))));
    }

    #[test]
    fn upper_bound_examples() {
        let nat = IndexPoset::nat();
        assert_eq!(upper_bound(&nat, &k("3"), &k("5"), 10).unwrap().key, k("5"));
        let anti = IndexPoset::antichain(vec![k("a"), k("b")]).unwrap();
        assert!(upper_bound(&anti, &k("a"), &k("b"), 10).is_none());
        let m = mardesic(&IndexPoset::nat()).unwrap();
        assert_eq!(upper_bound(&m, &k("{1}"), &k("{2}"), 4).unwrap().key, k("{1,2}"));
        let vee = IndexPoset::finite(
            vec![k("a"), k("b"), k("c")],
            &[(k("a"), k("c")), (k("b"), k("c"))],
        )
        .unwrap();
        let mv = mardesic(&vee).unwrap();
        assert_eq!(upper_bound(&mv, &k("{a}"), &k("{b}"), 9).unwrap().key, k("{a,b,c}"));
    }

    #[test]
    fn pairs_poset() {
        let nat = IndexPoset::nat();
        let id: KeyFn = std::sync::Arc::new(|k: &Key| Some(k.clone()));
        let c = IndexPoset::pairs(nat.clone(), nat, id, "id");
        let w = c.window(2);
        assert_eq!(w.len(), 6);
        assert!(c.leq(&k("(1,0)"), &k("(2,1)")));
        assert!(!c.leq(&k("(1,1)"), &k("(2,0)")));
        assert!(!c.contains(&k("(0,1)")));
        assert_eq!(c.predecessors(&k("(1,1)")).unwrap().len(), 2);
    }
}
