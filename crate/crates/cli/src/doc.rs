//! System and morphism documents.
//!
//! Documents are JSON. Field order is fixed by the struct definitions, so
//! [`canonical`] output is byte-stable and parse/serialize round-trips.

use std::collections::HashMap;

use prokit_core::fuzz::{gen_planted_level_iso, GenBackend, PlantSpec};
use prokit_core::indexset::{self, IndexPoset};
use prokit_core::system::TableMaterial;
use prokit_core::{DelayMorphism, DelaySystem, Error, Key, Mor, Obj};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::registry;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    pub category: CategoryBlock,
    pub index: IndexBlock,
    #[serde(default)]
    pub objects: Vec<ObjectEntry>,
    pub bonds: BondsBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "snake_case")]
pub enum CategoryBlock {
    Finset,
    Matmod { modulus: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IndexBlock {
    /// Explicit elements; `leq` pairs are closed reflexively and transitively.
    Finite {
        elements: Vec<Key>,
        #[serde(default)]
        leq: Vec<(Key, Key)>,
    },
    Chain {
        elements: Vec<Key>,
    },
    Nat,
    NatSquare,
    MardesicOf {
        base: Box<IndexBlock>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectEntry {
    pub at: Key,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BondsBlock {
    Explicit {
        entries: Vec<BondEntry>,
    },
    /// A named generator from the registry. Sequence generators need the
    /// `nat` index.
    Generated {
        generator: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        plant: Option<PlantSpec>,
    },
}

/// `bond(lower, upper): X_upper -> X_lower`. `values` are point images for
/// finite sets and row-major matrix entries for modules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BondEntry {
    pub lower: Key,
    pub upper: Key,
    pub values: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDocument {
    pub pair: PairBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PairBlock {
    Explicit {
        source: Box<SystemDocument>,
        target: Box<SystemDocument>,
        morphism: MorphismBlock,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        inverse: Option<MorphismBlock>,
    },
    /// Strict sequences with a level isomorphism whose squares at `0`
    /// commute from `plant.morphism_delay` on.
    PlantedLevelIso { plant: PlantSpec },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MorphismBlock {
    Identity,
    /// `f(b) = b + by` with components `bond(b, b + by)`; source and target
    /// must be the same system over `nat`.
    Shift { by: u64 },
    Table { entries: Vec<ComponentEntry> },
}

/// `f(at) = index`, component `X_index -> Y_at` given by `values`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentEntry {
    pub at: Key,
    pub index: Key,
    pub values: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DocError {
    Parse { line: usize, column: usize, message: String },
    Invalid(String),
    Core(Error),
}

impl std::fmt::Display for DocError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DocError::Parse { line, column, message } => {
                write!(f, "parse error at line {line}, column {column}: {message}")
            }
            DocError::Invalid(m) => write!(f, "invalid document: {m}"),
            DocError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for DocError {
    fn from(e: Error) -> Self {
        DocError::Core(e)
    }
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, DocError> {
    serde_json::from_str(text).map_err(|e| DocError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Pretty JSON with a trailing newline.
pub fn canonical<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

impl IndexBlock {
    pub fn build(&self) -> Result<IndexPoset, DocError> {
        Ok(match self {
            IndexBlock::Finite { elements, leq } => IndexPoset::finite(elements.clone(), leq)?,
            IndexBlock::Chain { elements } => {
                let mut seen = elements.clone();
                seen.sort();
                seen.dedup();
                if seen.len() != elements.len() {
                    return Err(DocError::Invalid("duplicate chain element".into()));
                }
                IndexPoset::chain(elements.clone())
            }
            IndexBlock::Nat => IndexPoset::nat(),
            IndexBlock::NatSquare => IndexPoset::nat_square(),
            IndexBlock::MardesicOf { base } => indexset::mardesic(&base.build()?)?,
        })
    }

    fn is_nat(&self) -> bool {
        matches!(self, IndexBlock::Nat)
    }
}

impl CategoryBlock {
    fn object(&self, entry: &ObjectEntry) -> Result<Obj, DocError> {
        match (self, &entry.points, entry.dim) {
            (CategoryBlock::Finset, Some(points), None) => Ok(Obj::finset(points.iter().cloned())?),
            (CategoryBlock::Matmod { modulus }, None, Some(dim)) => Ok(Obj::matmod(dim, *modulus)?),
            (CategoryBlock::Finset, ..) => Err(DocError::Invalid(format!(
                "object at {} needs `points` (and no `dim`) in finset",
                entry.at
            ))),
            (CategoryBlock::Matmod { .. }, ..) => Err(DocError::Invalid(format!(
                "object at {} needs `dim` (and no `points`) in matmod",
                entry.at
            ))),
        }
    }

    fn morphism(&self, dom: Obj, cod: Obj, values: &[u64]) -> Result<Mor, DocError> {
        Ok(match self {
            CategoryBlock::Finset => {
                let images = values
                    .iter()
                    .map(|&v| u32::try_from(v).map_err(|_| DocError::Invalid(format!("point index {v} too large"))))
                    .collect::<Result<Vec<u32>, _>>()?;
                Mor::map(dom, cod, images)?
            }
            CategoryBlock::Matmod { .. } => Mor::matrix(dom, cod, values.to_vec())?,
        })
    }

    pub fn accepts(&self, backend: GenBackend) -> bool {
        matches!(
            (self, backend),
            (CategoryBlock::Finset, GenBackend::FinSet { .. })
        ) || matches!((self, backend), (CategoryBlock::Matmod { modulus }, GenBackend::MatMod { modulus: m, .. }) if *modulus == m)
    }

    pub fn of(obj: &Obj) -> CategoryBlock {
        match obj {
            Obj::FinSet(_) => CategoryBlock::Finset,
            Obj::MatMod { modulus, .. } => CategoryBlock::Matmod { modulus: *modulus },
        }
    }
}

impl SystemDocument {
    pub fn build(&self) -> Result<DelaySystem, DocError> {
        let index = self.index.build()?;
        let mut objects = HashMap::new();
        for entry in &self.objects {
            if !index.contains(&entry.at) {
                return Err(DocError::Invalid(format!("object at unknown element {}", entry.at)));
            }
            if objects.insert(entry.at.clone(), self.category.object(entry)?).is_some() {
                return Err(DocError::Invalid(format!("two objects at {}", entry.at)));
            }
        }
        match &self.bonds {
            BondsBlock::Explicit { entries } => {
                let mut bonds = HashMap::new();
                for e in entries {
                    for k in [&e.lower, &e.upper] {
                        if !index.contains(k) {
                            return Err(DocError::Invalid(format!("bond at unknown element {k}")));
                        }
                    }
                    if !index.leq(&e.lower, &e.upper) {
                        return Err(DocError::Invalid(format!("bond {} -> {} against the order", e.upper, e.lower)));
                    }
                    let missing = |k: &Key| DocError::Invalid(format!("no object at {k}"));
                    let dom = objects.get(&e.upper).cloned().ok_or_else(|| missing(&e.upper))?;
                    let cod = objects.get(&e.lower).cloned().ok_or_else(|| missing(&e.lower))?;
                    let mor = self.category.morphism(dom, cod, &e.values)?;
                    if bonds.insert((e.lower.clone(), e.upper.clone()), mor).is_some() {
                        return Err(DocError::Invalid(format!("two bonds for ({}, {})", e.lower, e.upper)));
                    }
                }
                Ok(DelaySystem::new(index, TableMaterial { objects, bonds }))
            }
            BondsBlock::Generated { generator, plant } => {
                if !self.index.is_nat() {
                    return Err(DocError::Invalid(format!("generator {generator:?} needs the nat index")));
                }
                if let Some(p) = plant {
                    if !self.category.accepts(p.backend) {
                        return Err(DocError::Invalid("plant backend does not match the category".into()));
                    }
                }
                let first = self.objects.first().map(|e| self.category.object(e)).transpose()?;
                registry::build(generator, plant.as_ref(), first)
            }
        }
    }

    /// Objects and bonds of `system` over its window, as an explicit
    /// finite document. Exact when the window is the whole index.
    pub fn tabulate(system: &DelaySystem, horizon: usize) -> Result<SystemDocument, DocError> {
        let idx = system.index();
        let keys = idx.window_keys(horizon);
        let mut leq = Vec::new();
        let mut objects = Vec::new();
        let mut entries = Vec::new();
        let mut category = None;
        for a in &keys {
            let obj = system.try_object(a)?;
            category.get_or_insert(CategoryBlock::of(&obj));
            objects.push(match &obj {
                Obj::FinSet(points) => ObjectEntry {
                    at: a.clone(),
                    points: Some(points.to_vec()),
                    dim: None,
                },
                Obj::MatMod { dim, .. } => ObjectEntry {
                    at: a.clone(),
                    points: None,
                    dim: Some(*dim),
                },
            });
            for b in &keys {
                if a != b && idx.leq(a, b) {
                    leq.push((a.clone(), b.clone()));
                    entries.push(BondEntry {
                        lower: a.clone(),
                        upper: b.clone(),
                        values: values(&system.try_bond(a, b)?),
                    });
                }
            }
        }
        Ok(SystemDocument {
            category: category.unwrap_or(CategoryBlock::Finset),
            index: IndexBlock::Finite { elements: keys, leq },
            objects,
            bonds: BondsBlock::Explicit { entries },
            horizon: None,
        })
    }
}

fn values(m: &Mor) -> Vec<u64> {
    match (m.images(), m.entries()) {
        (Some(im), _) => im.iter().map(|&v| u64::from(v)).collect(),
        (_, Some(en)) => en.to_vec(),
        _ => Vec::new(),
    }
}

/// A morphism document resolved to library values.
pub struct MorphismPair {
    pub morphism: DelayMorphism,
    pub inverse: Option<DelayMorphism>,
}

impl MorphismDocument {
    pub fn build(&self) -> Result<MorphismPair, DocError> {
        match &self.pair {
            PairBlock::PlantedLevelIso { plant } => {
                let p = gen_planted_level_iso(plant)?;
                Ok(MorphismPair {
                    morphism: p.morphism,
                    inverse: Some(p.inverse),
                })
            }
            PairBlock::Explicit {
                source,
                target,
                morphism,
                inverse,
            } => {
                let x = source.build()?;
                let y = if target == source { x.clone() } else { target.build()? };
                let m = build_morphism(morphism, (source, &x), (target, &y), "f")?;
                let w = inverse
                    .as_ref()
                    .map(|b| build_morphism(b, (target, &y), (source, &x), "g"))
                    .transpose()?;
                Ok(MorphismPair { morphism: m, inverse: w })
            }
        }
    }
}

fn build_morphism(
    block: &MorphismBlock,
    (xdoc, x): (&SystemDocument, &DelaySystem),
    (ydoc, y): (&SystemDocument, &DelaySystem),
    label: &str,
) -> Result<DelayMorphism, DocError> {
    match block {
        MorphismBlock::Identity => {
            if xdoc != ydoc {
                return Err(DocError::Core(Error::Boundary(
                    "identity needs the same source and target system".into(),
                )));
            }
            Ok(DelayMorphism::identity(x))
        }
        MorphismBlock::Shift { by } => {
            if xdoc != ydoc || !xdoc.index.is_nat() {
                return Err(DocError::Core(Error::Boundary(
                    "shift needs one system over nat as source and target".into(),
                )));
            }
            let by = *by;
            let s = x.clone();
            Ok(DelayMorphism::new(
                x.clone(),
                x.clone(),
                move |b| b.as_nat().map(|n| Key::Nat(n + by)),
                move |b| s.bond(b, &Key::Nat(b.as_nat()? + by)),
                format!("shift{by}"),
            ))
        }
        MorphismBlock::Table { entries } => {
            let mut index = HashMap::new();
            let mut comps = HashMap::new();
            for e in entries {
                if !y.index().contains(&e.at) || !x.index().contains(&e.index) {
                    return Err(DocError::Core(Error::Boundary(format!(
                        "component {} -> {} outside the systems",
                        e.index, e.at
                    ))));
                }
                let dom = x.try_object(&e.index)?;
                let cod = y.try_object(&e.at)?;
                comps.insert(e.at.clone(), xdoc.category.morphism(dom, cod, &e.values)?);
                index.insert(e.at.clone(), e.index.clone());
            }
            if xdoc.category != ydoc.category {
                return Err(DocError::Core(Error::Boundary("source and target categories differ".into())));
            }
            Ok(DelayMorphism::from_tables(x.clone(), y.clone(), index, comps, label))
        }
    }
}
