//! Delay morphisms between delay systems.
//!
//! A morphism `X -> Y` over index sets `A`, `B` is an index map
//! `f: B -> A` with components `f_b: X_{f(b)} -> Y_b`. It is a delay
//! morphism when every `b` has `b* >= b` such that each `b' >= b*` admits
//! some `a` with `q_{bb'} f_{b'} p_{f(b')a'} = f_b p_{f(b)a'}` for all
//! `a' >= a`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::category::{compose as mor_compose, composite_eq, hom_set, identity, Mor};
use crate::error::{Error, Result};
use crate::indexset::{self, first_upper_bound, IndexPoset, Key, KeyFn, Subset};
use crate::system::{check_strict, commutation_entry, first_clear, greedy_chain, restrict, DelaySystem, Restriction};
use crate::verdict::{Counterexample, Mode, Search, Status, Verdict, Witness};

pub type CompFn = Arc<dyn Fn(&Key) -> Option<Mor> + Send + Sync>;

#[derive(Clone)]
pub struct DelayMorphism {
    source: DelaySystem,
    target: DelaySystem,
    index_map: KeyFn,
    components: CompFn,
    label: String,
}

impl fmt::Debug for DelayMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DelayMorphism({}: {:?} -> {:?})", self.label, self.source, self.target)
    }
}

impl DelayMorphism {
    pub fn new(
        source: DelaySystem,
        target: DelaySystem,
        index_map: impl Fn(&Key) -> Option<Key> + Send + Sync + 'static,
        components: impl Fn(&Key) -> Option<Mor> + Send + Sync + 'static,
        label: impl Into<String>,
    ) -> Self {
        DelayMorphism {
            source,
            target,
            index_map: Arc::new(index_map),
            components: Arc::new(components),
            label: label.into(),
        }
    }

    pub fn from_tables(
        source: DelaySystem,
        target: DelaySystem,
        index_map: HashMap<Key, Key>,
        components: HashMap<Key, Mor>,
        label: impl Into<String>,
    ) -> Self {
        DelayMorphism::new(
            source,
            target,
            move |b| index_map.get(b).cloned(),
            move |b| components.get(b).cloned(),
            label,
        )
    }

    /// Identity index map and identity components.
    pub fn identity(system: &DelaySystem) -> Self {
        let s = system.clone();
        DelayMorphism::new(
            system.clone(),
            system.clone(),
            |b| Some(b.clone()),
            move |b| s.object_at(b).map(|x| identity(&x)),
            "identity",
        )
    }

    pub fn source(&self) -> &DelaySystem {
        &self.source
    }

    pub fn target(&self) -> &DelaySystem {
        &self.target
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `f(b)`, when `b` is an index of the target and `f(b)` one of the source.
    pub fn index_at(&self, b: &Key) -> Option<Key> {
        if !self.target.index().contains(b) {
            return None;
        }
        (self.index_map)(b).filter(|a| self.source.index().contains(a))
    }

    pub fn component(&self, b: &Key) -> Option<Mor> {
        if !self.target.index().contains(b) {
            return None;
        }
        (self.components)(b)
    }

    pub fn try_index_at(&self, b: &Key) -> Result<Key> {
        self.index_at(b).ok_or_else(|| Error::Undefined {
            key: b.clone(),
            what: format!("index map of {}", self.label),
        })
    }

    pub fn try_component(&self, b: &Key) -> Result<Mor> {
        self.component(b).ok_or_else(|| Error::Undefined {
            key: b.clone(),
            what: format!("component of {}", self.label),
        })
    }

    /// The same data between other systems over compatible index sets.
    pub fn retarget(&self, source: DelaySystem, target: DelaySystem) -> DelayMorphism {
        DelayMorphism {
            source,
            target,
            index_map: Arc::clone(&self.index_map),
            components: Arc::clone(&self.components),
            label: self.label.clone(),
        }
    }

    /// Same index set on both sides with the identity index map on the window.
    pub fn is_level(&self, horizon: usize) -> bool {
        self.source.index().same(self.target.index())
            && self
                .target
                .index()
                .window_keys(horizon)
                .iter()
                .all(|c| self.index_at(c).as_ref() == Some(c))
    }
}

fn both_modes(m: &DelayMorphism, horizon: usize) -> Mode {
    m.source.index().mode(horizon).meet(m.target.index().mode(horizon))
}

/// Smallest source horizon (by doubling, capped) whose window contains
/// `f(b)` for every `b` in the target window.
fn source_horizon(m: &DelayMorphism, horizon: usize) -> Result<usize> {
    let ai = m.source.index();
    let fs: Vec<Key> = m
        .target
        .index()
        .window_keys(horizon)
        .iter()
        .map(|b| m.try_index_at(b))
        .collect::<Result<_>>()?;
    let cap = horizon.saturating_mul(8).saturating_add(64);
    let mut hz = horizon;
    loop {
        if ai.window_complete(hz) || hz >= cap {
            return Ok(hz);
        }
        let wa: std::collections::HashSet<Key> = ai.window_keys(hz).into_iter().collect();
        if fs.iter().all(|a| wa.contains(a)) {
            return Ok(hz);
        }
        hz = hz.saturating_mul(2).saturating_add(1).min(cap);
    }
}

/// Source window, target window and the combined mode.
fn windows(m: &DelayMorphism, horizon: usize) -> Result<(Vec<Key>, Vec<Key>, Mode)> {
    let hz = source_horizon(m, horizon)?;
    let (ai, bi) = (m.source.index(), m.target.index());
    let mode = ai.mode(hz).meet(bi.mode(horizon));
    Ok((ai.window_keys(hz), bi.window_keys(horizon), mode))
}

/// Index map totality and component boundaries over the window.
pub fn check_components(m: &DelayMorphism, horizon: usize) -> Verdict {
    let mode = both_modes(m, horizon);
    for b in m.target.index().window_keys(horizon) {
        let Some(a) = m.index_at(&b) else {
            return Verdict::fails(mode, vec![b], "index map undefined");
        };
        let Some(c) = m.component(&b) else {
            return Verdict::fails(mode, vec![b], "component undefined");
        };
        let (Some(x), Some(y)) = (m.source.object_at(&a), m.target.object_at(&b)) else {
            return Verdict::fails(mode, vec![b, a], "object undefined");
        };
        if *c.dom() != x || *c.cod() != y {
            return Verdict::fails(mode, vec![b, a], "component boundary mismatch");
        }
    }
    Verdict::holds(mode, Vec::new())
}

struct Row {
    b: Key,
    status: Status,
    chosen: Vec<Key>,
    blame: Vec<Key>,
}

fn rows_verdict(mode: Mode, rows: Vec<Row>, failure: &str) -> Verdict {
    let mut v = Verdict::holds(mode, Vec::new());
    for row in rows {
        v.status = v.status.and(row.status);
        if !row.chosen.is_empty() {
            v.witnesses.push(Witness::new(vec![row.b.clone()], row.chosen));
        }
        if row.status != Status::Holds && v.counterexample.is_none() {
            let mut elements = vec![row.b];
            elements.extend(row.blame);
            let reason = match row.status {
                Status::Fails => failure.to_string(),
                _ => format!("{failure} inside the window"),
            };
            v.counterexample = Some(Counterexample { elements, reason });
        }
    }
    v
}

fn row_status(search: &Search, mode: Mode, tentative: bool) -> Status {
    match search {
        Search::Found { forced, .. } if (*forced || tentative) && !mode.is_exact() => Status::Inconclusive,
        Search::Found { .. } => Status::Holds,
        Search::NotFound if mode.is_exact() => Status::Fails,
        Search::NotFound => Status::Inconclusive,
    }
}

/// Per-`b` data of the delay-morphism condition.
struct MorphismRow {
    status: Status,
    b: Key,
    b_star: Option<Key>,
    /// `b' -> a(b, b')` for every `b' >= b*` in the window.
    inner: HashMap<Key, Key>,
    bad: Option<Key>,
}

fn morphism_rows(m: &DelayMorphism, horizon: usize) -> Result<(Mode, Vec<MorphismRow>)> {
    let (ai, bi) = (m.source.index(), m.target.index());
    let (wa, wb, mode) = windows(m, horizon)?;
    let fs: Vec<Key> = wb.iter().map(|b| m.try_index_at(b)).collect::<Result<_>>()?;
    let comps: Vec<Mor> = wb.iter().map(|b| m.try_component(b)).collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(wb.len());
    for (i, b) in wb.iter().enumerate() {
        let mut rhs: HashMap<&Key, Mor> = HashMap::new();
        for a in wa.iter().filter(|a| ai.leq(&fs[i], a)) {
            rhs.insert(a, mor_compose(&comps[i], &m.source.try_bond(&fs[i], a)?)?);
        }
        let above: Vec<usize> = (0..wb.len()).filter(|&j| bi.leq(b, &wb[j])).collect();
        let mut found: HashMap<usize, (Key, bool)> = HashMap::new();
        let mut bad_mids: Vec<&Key> = Vec::new();
        for &j in &above {
            let lhs = mor_compose(&m.target.try_bond(b, &wb[j])?, &comps[j])?;
            let cands: Vec<&Key> = wa
                .iter()
                .filter(|a| rhs.contains_key(a) && ai.leq(&fs[j], a))
                .collect();
            let mut bad = Vec::new();
            for a in &cands {
                if !composite_eq(&lhs, &m.source.try_bond(&fs[j], a)?, &rhs[a]) {
                    bad.push(*a);
                }
            }
            match first_clear(ai, &wa, &cands, &bad) {
                Search::Found { witness, forced } => {
                    found.insert(j, (witness, forced));
                }
                Search::NotFound => bad_mids.push(&wb[j]),
            }
        }
        let above_keys: Vec<&Key> = above.iter().map(|&j| &wb[j]).collect();
        let search = first_clear(bi, &wb, &above_keys, &bad_mids);
        let mut row = MorphismRow {
            status: Status::Holds,
            b: b.clone(),
            b_star: None,
            inner: HashMap::new(),
            bad: bad_mids.first().map(|k| (*k).clone()),
        };
        let mut tentative = false;
        if let Search::Found { witness, .. } = &search {
            for &j in &above {
                if bi.leq(witness, &wb[j]) {
                    let (a, forced) = &found[&j];
                    tentative |= *forced;
                    row.inner.insert(wb[j].clone(), a.clone());
                }
            }
            row.b_star = Some(witness.clone());
            row.bad = None;
        }
        row.status = row_status(&search, mode, tentative);
        rows.push(row);
    }
    Ok((mode, rows))
}

/// The delay-morphism condition over the window. Witnesses are
/// `b -> [b*, a(b, b*)]`.
pub fn check_delay_morphism(m: &DelayMorphism, horizon: usize) -> Result<Verdict> {
    let (mode, rows) = morphism_rows(m, horizon)?;
    let rows = rows
        .into_iter()
        .map(|r| {
            let chosen = match &r.b_star {
                Some(s) => vec![s.clone(), r.inner[s].clone()],
                None => Vec::new(),
            };
            Row {
                b: r.b,
                status: r.status,
                chosen,
                blame: r.bad.into_iter().collect(),
            }
        })
        .collect();
    Ok(rows_verdict(mode, rows, "no delay index for the morphism condition"))
}

fn same_ends(m1: &DelayMorphism, m2: &DelayMorphism) -> Result<()> {
    if !m1.source.same(&m2.source) || !m1.target.same(&m2.target) {
        return Err(Error::Boundary(format!(
            "{} and {} have different source or target",
            m1.label, m2.label
        )));
    }
    Ok(())
}

/// `f_b p_{f(b)a} = f'_b p_{f'(b)a}` for all `a` above some `a_b`.
/// Witnesses are `b -> [a_b]`.
pub fn d_equiv(m1: &DelayMorphism, m2: &DelayMorphism, horizon: usize) -> Result<Verdict> {
    same_ends(m1, m2)?;
    let ai = m1.source.index();
    let hz = source_horizon(m1, horizon)?.max(source_horizon(m2, horizon)?);
    let mode = ai.mode(hz).meet(m1.target.index().mode(horizon));
    let wa = ai.window_keys(hz);
    let mut rows = Vec::new();
    for b in m1.target.index().window_keys(horizon) {
        let (f1, f2) = (m1.try_index_at(&b)?, m2.try_index_at(&b)?);
        let (c1, c2) = (m1.try_component(&b)?, m2.try_component(&b)?);
        let cands: Vec<&Key> = wa.iter().filter(|a| ai.leq(&f1, a) && ai.leq(&f2, a)).collect();
        let mut bad = Vec::new();
        for a in &cands {
            let lhs = mor_compose(&c1, &m1.source.try_bond(&f1, a)?)?;
            if !composite_eq(&c2, &m1.source.try_bond(&f2, a)?, &lhs) {
                bad.push(*a);
            }
        }
        let search = first_clear(ai, &wa, &cands, &bad);
        let status = row_status(&search, mode, false);
        let chosen = match search {
            Search::Found { witness, .. } => vec![witness],
            Search::NotFound => Vec::new(),
        };
        rows.push(Row {
            b,
            status,
            chosen,
            blame: bad.first().map(|k| (*k).clone()).into_iter().collect(),
        });
    }
    Ok(rows_verdict(mode, rows, "components never agree after bonding"))
}

/// `m2 ∘ m1`: index map `f ∘ g`, components `m2_c ∘ m1_{g(c)}`.
pub fn compose(m2: &DelayMorphism, m1: &DelayMorphism) -> Result<DelayMorphism> {
    if !m1.target.same(&m2.source) {
        return Err(Error::Boundary(format!(
            "target of {} is not the source of {}",
            m1.label, m2.label
        )));
    }
    let (a1, a2) = (m1.clone(), m2.clone());
    let (b1, b2) = (m1.clone(), m2.clone());
    Ok(DelayMorphism::new(
        m1.source.clone(),
        m2.target.clone(),
        move |c| a1.index_at(&a2.index_at(c)?),
        move |c| {
            let g = b2.index_at(c)?;
            mor_compose(&b2.component(c)?, &b1.component(&g)?).ok()
        },
        format!("{}∘{}", m2.label, m1.label),
    ))
}

/// `b <= b'` implies `f(b) <= f(b')` on the window.
pub fn is_increasing(m: &DelayMorphism, horizon: usize) -> Result<Verdict> {
    let (ai, bi) = (m.source.index(), m.target.index());
    let mode = both_modes(m, horizon);
    let wb = bi.window_keys(horizon);
    let fs: Vec<Key> = wb.iter().map(|b| m.try_index_at(b)).collect::<Result<_>>()?;
    for (i, b) in wb.iter().enumerate() {
        for (j, b2) in wb.iter().enumerate() {
            if bi.leq(b, b2) && !ai.leq(&fs[i], &fs[j]) {
                return Ok(Verdict::fails(
                    mode,
                    vec![b.clone(), b2.clone()],
                    "index map is not increasing",
                ));
            }
        }
    }
    Ok(Verdict::holds(mode, Vec::new()))
}

/// An increasing index map `f' >= f` with `f'_b = f_b p_{f(b)f'(b)}`,
/// tabulated on the window.
///
/// `f'(b)` is the first window element above `f(b)`, the commutation index
/// of `f(b)`, the morphism-condition witnesses `a(x, b)` for all `x <= b`
/// with `b >= x*`, and `f'` of every predecessor of `b`.
pub fn make_special(m: &DelayMorphism, horizon: usize) -> Result<DelayMorphism> {
    let (ai, bi) = (m.source.index(), m.target.index());
    indexset::is_cofinite(bi, horizon)?;
    let (_, rows) = morphism_rows(m, horizon)?;
    if let Some(r) = rows.iter().find(|r| r.status != Status::Holds) {
        return Err(match r.status {
            Status::Fails => Error::Precondition(format!("not a delay morphism at {}", r.b)),
            _ => Error::inconclusive(horizon, format!("no confirmed delay index at {}", r.b)),
        });
    }
    let hz = source_horizon(m, horizon)?;
    let wa = ai.window_keys(hz);
    let wb = bi.window_keys(horizon);
    let amode = ai.mode(hz);
    let mut u: HashMap<Key, Key> = HashMap::new();
    for b in &wb {
        let fb = m.try_index_at(b)?;
        let star = commutation_entry(&m.source, &fb, &wa, amode)?
            .witness
            .ok_or_else(|| Error::inconclusive(horizon, format!("no commutation index for {fb}")))?;
        let mut lows = vec![fb.clone(), star];
        for r in &rows {
            if bi.leq(&r.b, b) {
                if let Some(a) = r.inner.get(b) {
                    lows.push(a.clone());
                }
            }
        }
        let refs: Vec<&Key> = lows.iter().collect();
        let ub = first_upper_bound(ai, &wa, &refs)
            .ok_or_else(|| Error::inconclusive(horizon, format!("no upper bound for the shift at {b}")))?;
        u.insert(b.clone(), ub.clone());
    }
    let mut fprime: HashMap<Key, Key> = HashMap::new();
    for b in &wb {
        special_index(bi, ai, &wa, &u, &mut fprime, b, horizon)?;
    }
    let mut comps = HashMap::new();
    for b in &wb {
        let fb = m.try_index_at(b)?;
        let shift = m.source.try_bond(&fb, &fprime[b])?;
        comps.insert(b.clone(), mor_compose(&m.try_component(b)?, &shift)?);
    }
    Ok(DelayMorphism::from_tables(
        m.source.clone(),
        m.target.clone(),
        fprime,
        comps,
        format!("special({})", m.label),
    ))
}

fn special_index(
    bi: &IndexPoset,
    ai: &IndexPoset,
    wa: &[Key],
    u: &HashMap<Key, Key>,
    memo: &mut HashMap<Key, Key>,
    b: &Key,
    horizon: usize,
) -> Result<Key> {
    if let Some(k) = memo.get(b) {
        return Ok(k.clone());
    }
    let own = u
        .get(b)
        .ok_or_else(|| Error::inconclusive(horizon, format!("{b} is outside the window")))?
        .clone();
    let preds = bi
        .predecessors(b)
        .ok_or_else(|| Error::Unsupported(format!("predecessors of {b}")))?;
    let mut lows = vec![own];
    for p in preds {
        lows.push(special_index(bi, ai, wa, u, memo, &p, horizon)?);
    }
    let refs: Vec<&Key> = lows.iter().collect();
    let k = first_upper_bound(ai, wa, &refs)
        .ok_or_else(|| Error::inconclusive(horizon, format!("no increasing bound at {b}")))?
        .clone();
    memo.insert(b.clone(), k.clone());
    Ok(k)
}

/// Increasing index map and, for every `b`, some `b_*` with
/// `q_{bb'} f_{b'} = f_b p_{f(b)f(b')}` for all `b' >= b_*`.
pub fn check_special(m: &DelayMorphism, horizon: usize) -> Result<Verdict> {
    let inc = is_increasing(m, horizon)?;
    if !inc.is_holds() {
        return Ok(inc);
    }
    let bi = m.target.index();
    let mode = both_modes(m, horizon);
    let wb = bi.window_keys(horizon);
    let mut rows = Vec::new();
    for b in &wb {
        let fb = m.try_index_at(b)?;
        let cb = m.try_component(b)?;
        let above: Vec<&Key> = wb.iter().filter(|x| bi.leq(b, x)).collect();
        let mut bad = Vec::new();
        for b2 in &above {
            let fb2 = m.try_index_at(b2)?;
            let lhs = mor_compose(&m.target.try_bond(b, b2)?, &m.try_component(b2)?)?;
            if !composite_eq(&cb, &m.source.try_bond(&fb, &fb2)?, &lhs) {
                bad.push(*b2);
            }
        }
        let search = first_clear(bi, &wb, &above, &bad);
        rows.push(Row {
            b: b.clone(),
            status: row_status(&search, mode, false),
            chosen: match search {
                Search::Found { witness, .. } => vec![witness],
                Search::NotFound => Vec::new(),
            },
            blame: bad.first().map(|k| (*k).clone()).into_iter().collect(),
        });
    }
    Ok(rows_verdict(mode, rows, "special condition never holds"))
}

/// Output of [`level_reindex`].
#[derive(Debug, Clone)]
pub struct LevelPackage {
    /// `{(a,b) | f(b) <= a}`, componentwise.
    pub index: IndexPoset,
    /// `X'_{(a,b)} = X_a`.
    pub source: DelaySystem,
    /// `Y'_{(a,b)} = Y_b`.
    pub target: DelaySystem,
    /// Components `f_b p_{f(b)a}`.
    pub level: DelayMorphism,
    /// `X -> X'`, `(a,b) -> a`.
    pub i: DelayMorphism,
    /// `Y -> Y'`, `(a,b) -> b`.
    pub j: DelayMorphism,
    /// `j ∘ m` against `level ∘ i`.
    pub square: Verdict,
}

/// Replace a special morphism by a level morphism over pairs.
pub fn level_reindex(m: &DelayMorphism, horizon: usize) -> Result<LevelPackage> {
    let special = check_special(m, horizon)?;
    match special.status {
        Status::Holds => {}
        Status::Fails => {
            return Err(Error::Precondition(format!(
                "morphism is not special: {:?}",
                special.counterexample
            )))
        }
        Status::Inconclusive => {
            return Err(Error::inconclusive(horizon, "special condition undecided"))
        }
    }
    let (x, y) = (m.source.clone(), m.target.clone());
    for idx in [x.index(), y.index()] {
        if !idx.is_antisymmetric() {
            return Err(Error::Precondition(format!("{} is not antisymmetric", idx.describe())));
        }
        indexset::is_cofinite(idx, horizon)?;
    }
    let f: KeyFn = {
        let m = m.clone();
        Arc::new(move |b: &Key| m.index_at(b))
    };
    let index = IndexPoset::pairs(x.index().clone(), y.index().clone(), f, m.label.clone());
    let first = |c: &Key| c.as_pair().map(|(a, _)| a.clone());
    let second = |c: &Key| c.as_pair().map(|(_, b)| b.clone());
    let source = {
        let (s1, s2) = (x.clone(), x.clone());
        DelaySystem::from_fns(
            index.clone(),
            move |c| s1.object_at(&first(c)?),
            move |c, d| s2.bond(&first(c)?, &first(d)?),
        )
    };
    let target = {
        let (s1, s2) = (y.clone(), y.clone());
        DelaySystem::from_fns(
            index.clone(),
            move |c| s1.object_at(&second(c)?),
            move |c, d| s2.bond(&second(c)?, &second(d)?),
        )
    };
    let level = {
        let label = format!("level({})", m.label);
        let m = m.clone();
        DelayMorphism::new(
            source.clone(),
            target.clone(),
            |c| Some(c.clone()),
            move |c| {
                let (a, b) = c.as_pair()?;
                let fb = m.index_at(b)?;
                mor_compose(&m.component(b)?, &m.source.bond(&fb, a)?).ok()
            },
            label,
        )
    };
    let i = {
        let x2 = x.clone();
        DelayMorphism::new(
            x.clone(),
            source.clone(),
            first,
            move |c| x2.object_at(&first(c)?).map(|o| identity(&o)),
            "first",
        )
    };
    let j = {
        let y2 = y.clone();
        DelayMorphism::new(
            y.clone(),
            target.clone(),
            second,
            move |c| y2.object_at(&second(c)?).map(|o| identity(&o)),
            "second",
        )
    };
    let square = d_equiv(&compose(&j, m)?, &compose(&level, &i)?, horizon)?;
    Ok(LevelPackage {
        index,
        source,
        target,
        level,
        i,
        j,
        square,
    })
}

/// `w ∘ m ~ 1_X` and `m ∘ w ~ 1_Y`.
pub fn verify_iso_pair(m: &DelayMorphism, w: &DelayMorphism, horizon: usize) -> Result<Verdict> {
    if !m.source.same(&w.target) || !m.target.same(&w.source) {
        return Err(Error::Boundary(format!(
            "{} and {} are not opposite morphisms",
            m.label, w.label
        )));
    }
    let left = d_equiv(&compose(w, m)?, &DelayMorphism::identity(&m.source), horizon)?;
    let right = d_equiv(&compose(m, w)?, &DelayMorphism::identity(&m.target), horizon)?;
    let mode = left.mode.meet(right.mode);
    Ok(Verdict::all(mode, [left, right]))
}

/// Exhaustive search for an inverse of a morphism between finite systems.
///
/// Tries every index map `A -> B` and every family of components, at most
/// `limit` candidates in total. Returns the first candidate that is a delay
/// morphism and passes [`verify_iso_pair`] exactly.
pub fn find_inverse(m: &DelayMorphism, limit: usize) -> Result<Option<DelayMorphism>> {
    let (ai, bi) = (m.source.index(), m.target.index());
    let (Some(ra), Some(rb)) = (ai.max_rank(), bi.max_rank()) else {
        return Err(Error::Unsupported("inverse search needs finite index sets".into()));
    };
    let horizon = ra.max(rb);
    let wa = ai.window_keys(horizon);
    let wb = bi.window_keys(horizon);
    let too_many = || Error::Unsupported(format!("inverse search exceeds {limit} candidates"));
    // hom sets Y_b -> X_a for every pair
    let mut homs: Vec<Vec<Vec<Mor>>> = Vec::with_capacity(wa.len());
    for a in &wa {
        let xa = m.source.try_object(a)?;
        let mut row = Vec::with_capacity(wb.len());
        for b in &wb {
            row.push(hom_set(&m.target.try_object(b)?, &xa, limit).ok_or_else(too_many)?);
        }
        homs.push(row);
    }
    let mut total: u128 = 0;
    let mut g = vec![0usize; wa.len()];
    loop {
        total += g.iter().enumerate().map(|(i, &j)| homs[i][j].len() as u128).product::<u128>();
        if total > limit as u128 {
            return Err(too_many());
        }
        if !odometer(&mut g, wb.len()) {
            break;
        }
    }
    let mut g = vec![0usize; wa.len()];
    loop {
        let sizes: Vec<usize> = g.iter().enumerate().map(|(i, &j)| homs[i][j].len()).collect();
        if sizes.iter().all(|&s| s > 0) {
            let mut pick = vec![0usize; wa.len()];
            loop {
                let index: HashMap<Key, Key> =
                    wa.iter().zip(&g).map(|(a, &j)| (a.clone(), wb[j].clone())).collect();
                let comps: HashMap<Key, Mor> = wa
                    .iter()
                    .enumerate()
                    .map(|(i, a)| (a.clone(), homs[i][g[i]][pick[i]].clone()))
                    .collect();
                let w = DelayMorphism::from_tables(m.target.clone(), m.source.clone(), index, comps, "inverse");
                if check_delay_morphism(&w, horizon)?.holds_exactly()
                    && verify_iso_pair(m, &w, horizon)?.holds_exactly()
                {
                    return Ok(Some(w));
                }
                if !mixed_odometer(&mut pick, &sizes) {
                    break;
                }
            }
        }
        if !odometer(&mut g, wb.len()) {
            break;
        }
    }
    Ok(None)
}

fn odometer(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

fn mixed_odometer(digits: &mut [usize], bases: &[usize]) -> bool {
    for (d, &b) in digits.iter_mut().zip(bases) {
        *d += 1;
        if *d < b {
            return true;
        }
        *d = 0;
    }
    false
}

/// Naturality squares `q_{cc'} f_{c'} = f_c p_{cc'}` of a level morphism on
/// every related pair of the window.
pub fn check_squares(m: &DelayMorphism, horizon: usize) -> Result<Verdict> {
    let idx = m.target.index();
    let mode = both_modes(m, horizon);
    let w = idx.window_keys(horizon);
    for c in &w {
        let fc = m.try_component(c)?;
        for c2 in w.iter().filter(|x| idx.leq(c, x)) {
            let lhs = mor_compose(&m.target.try_bond(c, c2)?, &m.try_component(c2)?)?;
            if !composite_eq(&fc, &m.source.try_bond(c, c2)?, &lhs) {
                return Ok(Verdict::fails(
                    mode,
                    vec![c.clone(), c2.clone()],
                    "naturality square does not commute",
                ));
            }
        }
    }
    Ok(Verdict::holds(mode, Vec::new()))
}

/// First `s >= c` such that every square `(c, c')` with `c' >= s` commutes.
fn square_index(m: &DelayMorphism, c: &Key, window: &[Key]) -> Result<Option<Key>> {
    let idx = m.target.index();
    let fc = m.try_component(c)?;
    let above: Vec<&Key> = window.iter().filter(|x| idx.leq(c, x)).collect();
    let mut bad = Vec::new();
    for c2 in &above {
        let lhs = mor_compose(&m.target.try_bond(c, c2)?, &m.try_component(c2)?)?;
        if !composite_eq(&fc, &m.source.try_bond(c, c2)?, &lhs) {
            bad.push(*c2);
        }
    }
    Ok(match first_clear(idx, window, &above, &bad) {
        Search::Found { witness, .. } => Some(witness),
        Search::NotFound => None,
    })
}

/// Output of [`extract_pro_iso`].
#[derive(Debug, Clone)]
pub struct ProIsoExtraction {
    pub chain: Vec<Key>,
    pub source: Restriction,
    pub target: Restriction,
    /// The level morphism between the restricted systems.
    pub morphism: DelayMorphism,
    pub inverse: Option<DelayMorphism>,
    pub source_strict: Verdict,
    pub target_strict: Verdict,
    pub squares: Verdict,
    /// [`verify_iso_pair`] on the restricted pair, when an inverse was given.
    pub iso: Option<Verdict>,
}

/// Chain on which both systems are strict and all squares commute.
///
/// The first term is the first chain element above every witness of the
/// first element; each later term is the first one strictly above the
/// commutation indices in `X` and `Y` and the square index of the previous
/// term.
pub fn extract_pro_iso(
    level: &DelayMorphism,
    inverse: Option<&DelayMorphism>,
    horizon: usize,
) -> Result<ProIsoExtraction> {
    if !level.is_level(horizon) {
        return Err(Error::Precondition(format!("{} is not a level morphism", level.label)));
    }
    if let Some(w) = inverse {
        if !w.source.same(&level.target) || !w.target.same(&level.source) {
            return Err(Error::Boundary("inverse does not run opposite to the morphism".into()));
        }
    }
    let idx = level.source.index();
    let mode = idx.mode(horizon);
    let window = idx.window_keys(horizon);
    let candidates = if idx.window_is_chain(horizon) {
        window.clone()
    } else {
        greedy_chain(idx, horizon)?
    };
    let witnesses = |c: &Key| -> Result<[Key; 3]> {
        let missing = || Error::inconclusive(horizon, format!("no witness for {c}"));
        let wx = commutation_entry(&level.source, c, &window, mode)?.witness.ok_or_else(missing)?;
        let wy = commutation_entry(&level.target, c, &window, mode)?.witness.ok_or_else(missing)?;
        let ws = square_index(level, c, &window)?.ok_or_else(missing)?;
        Ok([wx, wy, ws])
    };
    let first = witnesses(&candidates[0])?;
    let mut pos = candidates
        .iter()
        .position(|c| first.iter().all(|w| idx.leq(w, c)))
        .ok_or_else(|| Error::inconclusive(horizon, "no chain element above the first witnesses"))?;
    let mut chain = vec![candidates[pos].clone()];
    loop {
        let ws = witnesses(&candidates[pos])?;
        match candidates[pos + 1..]
            .iter()
            .position(|c| ws.iter().all(|w| idx.lt(w, c)))
        {
            Some(off) => {
                pos += 1 + off;
                chain.push(candidates[pos].clone());
            }
            None => break,
        }
    }
    let top = idx.rank(chain.last().expect("nonempty")).unwrap_or(0);
    let subset = Subset::keys(chain.clone());
    let source = restrict(&level.source, subset.clone(), top)?;
    let target = restrict(&level.target, subset, top)?;
    let morphism = level.retarget(source.system.clone(), target.system.clone());
    let inverse = inverse.map(|w| w.retarget(target.system.clone(), source.system.clone()));
    let source_strict = check_strict(&source.system, horizon)?;
    let target_strict = check_strict(&target.system, horizon)?;
    let squares = check_squares(&morphism, horizon)?;
    let iso = inverse
        .as_ref()
        .map(|w| verify_iso_pair(&morphism, w, horizon))
        .transpose()?;
    Ok(ProIsoExtraction {
        chain,
        source,
        target,
        morphism,
        inverse,
        source_strict,
        target_strict,
        squares,
        iso,
    })
}
