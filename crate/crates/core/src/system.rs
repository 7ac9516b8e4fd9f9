//! Delay-inverse systems and their object-level reductions.
//!
//! A system assigns an object to every index and a bond
//! `bond(a, a'): X_{a'} -> X_a` to every related pair `a <= a'`. It is a
//! delay system when every `a` has a commutation index `a* >= a` above
//! which all composites based at `a` commute:
//! `bond(a,a') ∘ bond(a',a'') = bond(a,a'')` for `a* <= a' <= a''`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::category::{composite_eq, identity, Mor, Obj};
use crate::dmorphism::DelayMorphism;
use crate::error::{Error, Result};
use crate::indexset::{self, max_of, IndexPoset, Key, Subset};
use crate::verdict::{Mode, Search, Status, Verdict, Witness};

/// Object and bond assignment of a system.
pub trait Material: Send + Sync {
    fn object(&self, a: &Key) -> Option<Obj>;
    /// `bond(a, b): X_b -> X_a` for `a <= b`.
    fn bond(&self, a: &Key, b: &Key) -> Option<Mor>;
}

type ObjFn = Arc<dyn Fn(&Key) -> Option<Obj> + Send + Sync>;
type BondFn = Arc<dyn Fn(&Key, &Key) -> Option<Mor> + Send + Sync>;

struct FnMaterial {
    object: ObjFn,
    bond: BondFn,
}

impl Material for FnMaterial {
    fn object(&self, a: &Key) -> Option<Obj> {
        (self.object)(a)
    }

    fn bond(&self, a: &Key, b: &Key) -> Option<Mor> {
        (self.bond)(a, b)
    }
}

/// Explicit tables; a missing diagonal bond defaults to the identity.
#[derive(Debug, Clone, Default)]
pub struct TableMaterial {
    pub objects: HashMap<Key, Obj>,
    pub bonds: HashMap<(Key, Key), Mor>,
}

impl Material for TableMaterial {
    fn object(&self, a: &Key) -> Option<Obj> {
        self.objects.get(a).cloned()
    }

    fn bond(&self, a: &Key, b: &Key) -> Option<Mor> {
        match self.bonds.get(&(a.clone(), b.clone())) {
            Some(m) => Some(m.clone()),
            None if a == b => self.objects.get(a).map(identity),
            None => None,
        }
    }
}

/// An `N`-indexed system given on `0..len`, constant beyond `len - 1`.
///
/// `bonds[a][k]` is `bond(a, a + k)`. For indices past the last stored one
/// the object repeats and bonds between them are identities.
#[derive(Debug, Clone)]
pub struct SequenceMaterial {
    objects: Vec<Obj>,
    bonds: Vec<Vec<Mor>>,
}

impl SequenceMaterial {
    pub fn new(objects: Vec<Obj>, bonds: Vec<Vec<Mor>>) -> Result<Self> {
        if objects.is_empty() {
            return Err(Error::Precondition("empty sequence".into()));
        }
        if bonds.len() != objects.len() || bonds.iter().enumerate().any(|(a, row)| row.len() != objects.len() - a) {
            return Err(Error::Precondition("bond table shape does not match the objects".into()));
        }
        Ok(SequenceMaterial { objects, bonds })
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn objects(&self) -> &[Obj] {
        &self.objects
    }

    pub fn bonds(&self) -> &[Vec<Mor>] {
        &self.bonds
    }

    fn clamp(&self, k: &Key) -> Option<usize> {
        Some((k.as_nat()? as usize).min(self.objects.len() - 1))
    }
}

impl Material for SequenceMaterial {
    fn object(&self, a: &Key) -> Option<Obj> {
        self.clamp(a).map(|i| self.objects[i].clone())
    }

    fn bond(&self, a: &Key, b: &Key) -> Option<Mor> {
        if a.as_nat()? > b.as_nat()? {
            return None;
        }
        let (i, j) = (self.clamp(a)?, self.clamp(b)?);
        Some(self.bonds[i][j - i].clone())
    }
}

/// A system `(X_a, bond(a,a'), A)`.
#[derive(Clone)]
pub struct DelaySystem {
    index: IndexPoset,
    material: Arc<dyn Material>,
}

impl fmt::Debug for DelaySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DelaySystem({})", self.index.describe())
    }
}

impl DelaySystem {
    pub fn new(index: IndexPoset, material: impl Material + 'static) -> Self {
        DelaySystem {
            index,
            material: Arc::new(material),
        }
    }

    pub fn from_fns(
        index: IndexPoset,
        object: impl Fn(&Key) -> Option<Obj> + Send + Sync + 'static,
        bond: impl Fn(&Key, &Key) -> Option<Mor> + Send + Sync + 'static,
    ) -> Self {
        DelaySystem::new(
            index,
            FnMaterial {
                object: Arc::new(object),
                bond: Arc::new(bond),
            },
        )
    }

    /// The one-object system over `N` with identity bonds.
    pub fn rudimentary(object: Obj) -> Self {
        let o = object.clone();
        DelaySystem::from_fns(IndexPoset::nat(), move |k| k.as_nat().map(|_| o.clone()), move |a, b| {
            (a.as_nat()? <= b.as_nat()?).then(|| identity(&object))
        })
    }

    pub fn index(&self) -> &IndexPoset {
        &self.index
    }

    pub fn object_at(&self, a: &Key) -> Option<Obj> {
        if self.index.contains(a) {
            self.material.object(a)
        } else {
            None
        }
    }

    pub fn bond(&self, a: &Key, b: &Key) -> Option<Mor> {
        if self.index.leq(a, b) {
            self.material.bond(a, b)
        } else {
            None
        }
    }

    pub fn try_object(&self, a: &Key) -> Result<Obj> {
        self.object_at(a).ok_or_else(|| Error::Undefined {
            key: a.clone(),
            what: "object".into(),
        })
    }

    pub fn try_bond(&self, a: &Key, b: &Key) -> Result<Mor> {
        self.bond(a, b).ok_or_else(|| Error::Undefined {
            key: Key::pair(a.clone(), b.clone()),
            what: "bond".into(),
        })
    }

    /// Same objects and bonds over the subset, with the inherited order.
    pub fn restricted(&self, subset: Subset) -> DelaySystem {
        DelaySystem {
            index: self.index.restrict_to(subset),
            material: Arc::clone(&self.material),
        }
    }

    /// Identical index set and material.
    pub fn same(&self, other: &DelaySystem) -> bool {
        Arc::ptr_eq(&self.material, &other.material) && self.index.same(&other.index)
    }
}

/// Bond boundaries, identity bonds and bond totality over the window.
pub fn check_wellformed(system: &DelaySystem, horizon: usize) -> Verdict {
    let index = system.index();
    let mode = index.mode(horizon);
    let w = index.window_keys(horizon);
    for a in &w {
        let Some(xa) = system.object_at(a) else {
            return Verdict::fails(mode, vec![a.clone()], "object undefined");
        };
        match system.bond(a, a) {
            Some(m) if m == identity(&xa) => {}
            Some(_) => return Verdict::fails(mode, vec![a.clone(), a.clone()], "diagonal bond is not the identity"),
            None => return Verdict::fails(mode, vec![a.clone(), a.clone()], "diagonal bond undefined"),
        }
    }
    for a in &w {
        let xa = system.object_at(a).expect("checked above");
        for b in &w {
            if a == b || !index.leq(a, b) {
                continue;
            }
            let Some(m) = system.bond(a, b) else {
                return Verdict::fails(mode, vec![a.clone(), b.clone()], "bond undefined");
            };
            let xb = system.object_at(b).expect("checked above");
            if *m.dom() != xb || *m.cod() != xa {
                return Verdict::fails(mode, vec![a.clone(), b.clone()], "bond boundary mismatch");
            }
        }
    }
    Verdict::holds(mode, Vec::new())
}

/// First candidate (in order) that lies below no bad element.
///
/// A hit is `forced` when it is not the first candidate and nothing in the
/// window lies strictly above it: the universal check at such a point is
/// vacuous, so windowed callers must not trust it.
pub(crate) fn first_clear(
    index: &IndexPoset,
    window: &[Key],
    candidates: &[&Key],
    bad: &[&Key],
) -> Search {
    for (i, c) in candidates.iter().enumerate() {
        if bad.iter().all(|m| !index.leq(c, m)) {
            let forced = i > 0 && !window.iter().any(|x| index.lt(c, x));
            return Search::Found {
                witness: (*c).clone(),
                forced,
            };
        }
    }
    Search::NotFound
}

/// One line of a [`CommutationReport`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommutationEntry {
    pub element: Key,
    pub status: Status,
    /// The commutation index found (tentative when inconclusive).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Key>,
    /// `(a, a', a'')` with `bond(a,a')∘bond(a',a'') != bond(a,a'')`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<(Key, Key, Key)>,
}

/// Per-element commutation indices over a window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommutationReport {
    pub mode: Mode,
    pub entries: Vec<CommutationEntry>,
}

impl CommutationReport {
    pub fn status(&self) -> Status {
        self.entries.iter().fold(Status::Holds, |s, e| s.and(e.status))
    }

    pub fn witness(&self, a: &Key) -> Option<&Key> {
        self.entries.iter().find(|e| &e.element == a)?.witness.as_ref()
    }

    pub fn to_verdict(&self) -> Verdict {
        let mut v = Verdict::holds(self.mode, Vec::new());
        v.status = self.status();
        for e in &self.entries {
            if let Some(w) = &e.witness {
                v.witnesses.push(Witness::new(vec![e.element.clone()], vec![w.clone()]));
            }
        }
        if let Some(bad) = self.entries.iter().find(|e| e.status != Status::Holds) {
            let mut elements = vec![bad.element.clone()];
            if let Some((_, x, y)) = &bad.counterexample {
                elements.extend([x.clone(), y.clone()]);
            }
            v.counterexample = Some(crate::verdict::Counterexample {
                elements,
                reason: match bad.status {
                    Status::Fails => "no commutation index".into(),
                    _ => "no confirmed commutation index inside the window".into(),
                },
            });
        }
        v
    }
}

/// The commutation-index search for one base element over a fixed window.
pub(crate) fn commutation_entry(
    system: &DelaySystem,
    a: &Key,
    window: &[Key],
    mode: Mode,
) -> Result<CommutationEntry> {
    let index = system.index();
    let above: Vec<&Key> = window.iter().filter(|x| index.leq(a, x)).collect();
    let from_a: Vec<Mor> = above
        .iter()
        .map(|x| system.try_bond(a, x))
        .collect::<Result<_>>()?;
    let mut bad: Vec<&Key> = Vec::new();
    let mut first_bad: Option<(Key, Key)> = None;
    for (i, mid) in above.iter().enumerate() {
        for (j, top) in above.iter().enumerate() {
            if i == j || !index.leq(mid, top) {
                continue;
            }
            let inner = system.try_bond(mid, top)?;
            if !composite_eq(&from_a[i], &inner, &from_a[j]) {
                bad.push(mid);
                if first_bad.is_none() {
                    first_bad = Some(((*mid).clone(), (*top).clone()));
                }
                break;
            }
        }
    }
    let counterexample = first_bad.map(|(x, y)| (a.clone(), x, y));
    let entry = match first_clear(index, window, &above, &bad) {
        Search::Found { witness, forced } => CommutationEntry {
            element: a.clone(),
            status: if forced && !mode.is_exact() {
                Status::Inconclusive
            } else {
                Status::Holds
            },
            witness: Some(witness),
            counterexample: None,
        },
        Search::NotFound => CommutationEntry {
            element: a.clone(),
            status: if mode.is_exact() {
                Status::Fails
            } else {
                Status::Inconclusive
            },
            witness: None,
            counterexample,
        },
    };
    Ok(entry)
}

/// The least `a* >= a` in enumeration order above which every composite
/// based at `a` commutes within the window. The witness is in
/// `chosen[0]` of the single [`Witness`].
pub fn min_commutation_index(system: &DelaySystem, a: &Key, horizon: usize) -> Result<Verdict> {
    let index = system.index();
    if index.rank(a).is_none_or(|r| r > horizon) {
        return Err(Error::Precondition(format!("{a} is not in the window at horizon {horizon}")));
    }
    let mode = index.mode(horizon);
    let window = index.window_keys(horizon);
    let entry = commutation_entry(system, a, &window, mode)?;
    Ok(CommutationReport {
        mode,
        entries: vec![entry],
    }
    .to_verdict())
}

/// [`min_commutation_index`] for every element of the window.
pub fn check_delay(system: &DelaySystem, horizon: usize) -> Result<CommutationReport> {
    let index = system.index();
    let mode = index.mode(horizon);
    let window = index.window_keys(horizon);
    let entries = window
        .iter()
        .map(|a| commutation_entry(system, a, &window, mode))
        .collect::<Result<_>>()?;
    Ok(CommutationReport { mode, entries })
}

/// Every triple `a <= a' <= a''` of the window commutes.
pub fn check_strict(system: &DelaySystem, horizon: usize) -> Result<Verdict> {
    let index = system.index();
    let mode = index.mode(horizon);
    let w = index.window_keys(horizon);
    for a in &w {
        let above: Vec<&Key> = w.iter().filter(|x| index.leq(a, x)).collect();
        let from_a: Vec<Mor> = above.iter().map(|x| system.try_bond(a, x)).collect::<Result<_>>()?;
        for (i, mid) in above.iter().enumerate() {
            for (j, top) in above.iter().enumerate() {
                if !index.leq(mid, top) {
                    continue;
                }
                let inner = system.try_bond(mid, top)?;
                if !composite_eq(&from_a[i], &inner, &from_a[j]) {
                    return Ok(Verdict::fails(
                        mode,
                        vec![a.clone(), (*mid).clone(), (*top).clone()],
                        "bond(a,a')∘bond(a',a'') != bond(a,a'')",
                    ));
                }
            }
        }
    }
    Ok(Verdict::holds(mode, Vec::new()))
}

/// A system isomorphic to another one together with the witnessing pair.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub system: DelaySystem,
    /// `X -> X'`.
    pub include: DelayMorphism,
    /// `X' -> X`.
    pub retract: DelayMorphism,
}

/// Restriction to a cofinal subset.
///
/// `include` has the inclusion as index map and identity components.
/// `retract` sends `a` to the first subset element above its commutation
/// index, with component `bond(a, j(a))`; it is tabulated on the window.
pub fn restrict(system: &DelaySystem, subset: Subset, horizon: usize) -> Result<Restriction> {
    let index = system.index();
    let cofinal = indexset::is_cofinal(index, &subset, horizon);
    match cofinal.status {
        Status::Holds => {}
        Status::Fails => {
            return Err(Error::Precondition(format!(
                "subset {subset} is not cofinal: {:?}",
                cofinal.counterexample
            )))
        }
        Status::Inconclusive => {
            return Err(Error::inconclusive(horizon, format!("cofinality of {subset} undecided")))
        }
    }
    let mode = index.mode(horizon);
    let window = index.window_keys(horizon);
    let members: Vec<&Key> = window.iter().filter(|k| subset.contains(k)).collect();
    let mut retract_index = HashMap::new();
    let mut retract_comp = HashMap::new();
    for a in &window {
        let entry = commutation_entry(system, a, &window, mode)?;
        let star = entry
            .witness
            .ok_or_else(|| Error::inconclusive(horizon, format!("no commutation index for {a}")))?;
        let target = members
            .iter()
            .find(|s| index.leq(&star, s))
            .ok_or_else(|| Error::inconclusive(horizon, format!("no subset member above {star}")))?;
        retract_comp.insert(a.clone(), system.try_bond(a, target)?);
        retract_index.insert(a.clone(), (*target).clone());
    }
    let restricted = system.restricted(subset.clone());
    let include = DelayMorphism::new(
        system.clone(),
        restricted.clone(),
        {
            let subset = subset.clone();
            move |b: &Key| subset.contains(b).then(|| b.clone())
        },
        {
            let sys = system.clone();
            move |b: &Key| sys.object_at(b).map(|x| identity(&x))
        },
        "inclusion",
    );
    let retract = DelayMorphism::new(
        restricted.clone(),
        system.clone(),
        move |a: &Key| retract_index.get(a).cloned(),
        move |a: &Key| retract_comp.get(a).cloned(),
        "retraction",
    );
    Ok(Restriction {
        system: restricted,
        include,
        retract,
    })
}

/// Reindexing over finite subsets having a maximum.
#[derive(Debug, Clone)]
pub struct MardesicReindex {
    pub system: DelaySystem,
    /// `X -> Y`: `b -> max b`, identity components.
    pub to_reindexed: DelayMorphism,
    /// `Y -> X`: `a -> {a}`, identity components.
    pub from_reindexed: DelayMorphism,
}

/// `Y_b = X_{max b}`, `q_{bb'} = bond(max b, max b')`.
pub fn mardesic_reindex(system: &DelaySystem) -> Result<MardesicReindex> {
    let base = system.index().clone();
    let b_index = indexset::mardesic(&base)?;
    let top = {
        let base = base.clone();
        move |b: &Key| max_of(&base, b.as_set()?)
    };
    let reindexed = {
        let (s1, s2) = (system.clone(), system.clone());
        let (t0, t1, t2) = (top.clone(), top.clone(), top.clone());
        DelaySystem::from_fns(
            b_index,
            move |b| s1.object_at(&t0(b)?),
            move |b, b2| s2.bond(&t1(b)?, &t2(b2)?),
        )
    };
    let to_reindexed = DelayMorphism::new(
        system.clone(),
        reindexed.clone(),
        top.clone(),
        {
            let s = system.clone();
            move |b: &Key| s.object_at(&top(b)?).map(|x| identity(&x))
        },
        "max",
    );
    let from_reindexed = DelayMorphism::new(
        reindexed.clone(),
        system.clone(),
        move |a: &Key| Some(Key::set([a.clone()])),
        {
            let s = system.clone();
            move |a: &Key| s.object_at(a).map(|x| identity(&x))
        },
        "singleton",
    );
    Ok(MardesicReindex {
        system: reindexed,
        to_reindexed,
        from_reindexed,
    })
}

/// Greedy strictly increasing chain through the window: each step takes
/// the first element strictly above the previous term and above the next
/// enumerated element.
pub(crate) fn greedy_chain(index: &IndexPoset, horizon: usize) -> Result<Vec<Key>> {
    let w = index.window_keys(horizon);
    let Some(first) = w.first() else {
        return Err(Error::Precondition("empty window".into()));
    };
    let mut chain = vec![first.clone()];
    for (i, a) in w.iter().enumerate().skip(1) {
        let last = chain.last().expect("nonempty");
        match w.iter().find(|x| index.lt(last, x) && index.leq(a, x)) {
            Some(next) => chain.push(next.clone()),
            None if w[i..].iter().all(|x| index.leq(x, last)) => break,
            None => {
                return Err(Error::inconclusive(
                    horizon,
                    format!("no chain successor above {last} and {a}"),
                ))
            }
        }
    }
    Ok(chain)
}

/// A greatest element of a fully enumerated index set.
fn maximum(index: &IndexPoset, horizon: usize) -> Option<Key> {
    if !index.window_complete(horizon) {
        return None;
    }
    let w = index.window_keys(horizon);
    w.iter().find(|m| w.iter().all(|x| index.leq(x, m))).cloned()
}

/// Reduction of a countable system to a sequence.
#[derive(Debug, Clone)]
pub struct SequenceReduction {
    /// The cofinal chain; empty for the rudimentary case.
    pub chain: Vec<Key>,
    /// The maximum, when the index set has one.
    pub maximum: Option<Key>,
    pub restriction: Restriction,
}

pub fn to_sequence(system: &DelaySystem, horizon: usize) -> Result<SequenceReduction> {
    let index = system.index();
    if let Some(top) = maximum(index, horizon) {
        let x = system.try_object(&top)?;
        let rudimentary = DelaySystem::rudimentary(x);
        let include = DelayMorphism::new(
            system.clone(),
            rudimentary.clone(),
            {
                let top = top.clone();
                move |n: &Key| n.as_nat().map(|_| top.clone())
            },
            {
                let s = system.clone();
                let top = top.clone();
                move |n: &Key| {
                    n.as_nat()?;
                    s.object_at(&top).map(|x| identity(&x))
                }
            },
            "to maximum",
        );
        let retract = DelayMorphism::new(
            rudimentary.clone(),
            system.clone(),
            |_a: &Key| Some(Key::Nat(0)),
            {
                let s = system.clone();
                let top = top.clone();
                move |a: &Key| s.bond(a, &top)
            },
            "from maximum",
        );
        return Ok(SequenceReduction {
            chain: Vec::new(),
            maximum: Some(top),
            restriction: Restriction {
                system: rudimentary,
                include,
                retract,
            },
        });
    }
    let directed = indexset::is_directed(index, horizon);
    if directed.is_fails() {
        return Err(Error::Precondition(format!(
            "index is not directed: {:?}",
            directed.counterexample
        )));
    }
    let chain = greedy_chain(index, horizon)?;
    let top_rank = chain.iter().filter_map(|k| index.rank(k)).max().unwrap_or(0);
    let restriction = restrict(system, Subset::keys(chain.clone()), top_rank)?;
    Ok(SequenceReduction {
        chain,
        maximum: None,
        restriction,
    })
}

/// A strictly commutative subsequence.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub chain: Vec<Key>,
    pub restriction: Restriction,
    /// `check_strict` on the extracted subsystem.
    pub strict: Verdict,
}

/// [`commutative_extract_from`] starting at the first element.
pub fn commutative_extract(system: &DelaySystem, horizon: usize) -> Result<Extraction> {
    let first = system
        .index()
        .window_keys(horizon)
        .into_iter()
        .next()
        .ok_or_else(|| Error::Precondition("empty window".into()))?;
    commutative_extract_from(system, &first, horizon)
}

/// Iterates `j_{k+1}` = first element strictly above the minimal
/// commutation index of `j_k`, until the next term would leave the window.
pub fn commutative_extract_from(system: &DelaySystem, start: &Key, horizon: usize) -> Result<Extraction> {
    let index = system.index();
    if !index.window_is_chain(horizon) {
        return Err(Error::Precondition(
            "index window is not a chain; reduce it with to_sequence first".into(),
        ));
    }
    let mode = index.mode(horizon);
    let window = index.window_keys(horizon);
    let mut pos = window
        .iter()
        .position(|k| k == start)
        .ok_or_else(|| Error::Precondition(format!("{start} is not in the window")))?;
    let mut chain = vec![start.clone()];
    loop {
        let entry = commutation_entry(system, &window[pos], &window, mode)?;
        let star = entry.witness.ok_or_else(|| {
            Error::inconclusive(horizon, format!("no commutation index for {}", window[pos]))
        })?;
        match window[pos + 1..].iter().position(|x| index.lt(&star, x)) {
            Some(off) => {
                pos += 1 + off;
                chain.push(window[pos].clone());
            }
            None => break,
        }
    }
    let top_rank = index.rank(chain.last().expect("nonempty")).unwrap_or(0);
    let restriction = restrict(system, Subset::keys(chain.clone()), top_rank)?;
    let strict = check_strict(&restriction.system, horizon)?;
    Ok(Extraction {
        chain,
        restriction,
        strict,
    })
}
