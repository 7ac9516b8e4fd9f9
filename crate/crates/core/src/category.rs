//! Concrete ambient categories with decidable morphism equality.
//!
//! Two backends: finite sets with total maps, and free modules `(Z/m)^n`
//! with matrices over `Z/m`. Equality of morphisms is structural.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which concrete category a value lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "backend")]
pub enum Backend {
    FinSet,
    MatMod { modulus: u64 },
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Obj {
    /// Labelled points, duplicate-free.
    FinSet(Arc<[String]>),
    /// `(Z/modulus)^dim`.
    MatMod { dim: usize, modulus: u64 },
}

impl fmt::Debug for Obj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obj::FinSet(points) => write!(f, "{{{}}}", points.join(",")),
            Obj::MatMod { dim, modulus } => write!(f, "(Z/{modulus})^{dim}"),
        }
    }
}

impl Obj {
    pub fn finset<S: Into<String>>(points: impl IntoIterator<Item = S>) -> Result<Obj> {
        let points: Vec<String> = points.into_iter().map(Into::into).collect();
        let mut sorted = points.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::MalformedObject("duplicate point label".into()));
        }
        Ok(Obj::FinSet(points.into()))
    }

    pub fn matmod(dim: usize, modulus: u64) -> Result<Obj> {
        if modulus < 2 {
            return Err(Error::MalformedObject(format!("modulus {modulus} < 2")));
        }
        Ok(Obj::MatMod { dim, modulus })
    }

    pub fn backend(&self) -> Backend {
        match self {
            Obj::FinSet(_) => Backend::FinSet,
            Obj::MatMod { modulus, .. } => Backend::MatMod { modulus: *modulus },
        }
    }

    /// Number of points, or the module rank.
    pub fn size(&self) -> usize {
        match self {
            Obj::FinSet(p) => p.len(),
            Obj::MatMod { dim, .. } => *dim,
        }
    }

    pub fn points(&self) -> Option<&[String]> {
        match self {
            Obj::FinSet(p) => Some(p),
            Obj::MatMod { .. } => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Payload {
    /// Image index in `cod` of every point of `dom`.
    Map(Arc<[u32]>),
    /// Row-major `cod.dim x dom.dim`, entries reduced mod `m`.
    Matrix(Arc<[u64]>),
}

/// A morphism `dom -> cod`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mor {
    dom: Obj,
    cod: Obj,
    payload: Payload,
}

impl fmt::Debug for Mor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.payload {
            Payload::Map(m) => write!(f, "{:?} -> {:?} {:?}", self.dom, self.cod, m),
            Payload::Matrix(m) => write!(f, "{:?} -> {:?} {:?}", self.dom, self.cod, m),
        }
    }
}

impl Mor {
    /// A map of finite sets from image indices.
    pub fn map(dom: Obj, cod: Obj, images: Vec<u32>) -> Result<Mor> {
        match (&dom, &cod) {
            (Obj::FinSet(d), Obj::FinSet(c)) => {
                if images.len() != d.len() {
                    return Err(Error::MalformedMorphism(format!(
                        "map has {} images for {} points",
                        images.len(),
                        d.len()
                    )));
                }
                if let Some(bad) = images.iter().find(|&&i| i as usize >= c.len()) {
                    return Err(Error::MalformedMorphism(format!(
                        "image index {bad} outside codomain of size {}",
                        c.len()
                    )));
                }
                Ok(Mor {
                    dom,
                    cod,
                    payload: Payload::Map(images.into()),
                })
            }
            _ => Err(Error::MalformedMorphism("map between non-FinSet objects".into())),
        }
    }

    /// A matrix mod `m`, row-major with `cod.dim` rows; entries are reduced.
    pub fn matrix(dom: Obj, cod: Obj, entries: Vec<u64>) -> Result<Mor> {
        match (&dom, &cod) {
            (
                Obj::MatMod { dim: n, modulus: m },
                Obj::MatMod {
                    dim: r,
                    modulus: m2,
                },
            ) if m == m2 => {
                if entries.len() != n * r {
                    return Err(Error::MalformedMorphism(format!(
                        "matrix has {} entries, expected {}x{}",
                        entries.len(),
                        r,
                        n
                    )));
                }
                let m = *m;
                Ok(Mor {
                    payload: Payload::Matrix(entries.into_iter().map(|e| e % m).collect()),
                    dom,
                    cod,
                })
            }
            _ => Err(Error::MalformedMorphism(
                "matrix between objects of different moduli or non-MatMod objects".into(),
            )),
        }
    }

    pub fn dom(&self) -> &Obj {
        &self.dom
    }

    pub fn cod(&self) -> &Obj {
        &self.cod
    }

    pub fn images(&self) -> Option<&[u32]> {
        match &self.payload {
            Payload::Map(m) => Some(m),
            Payload::Matrix(_) => None,
        }
    }

    pub fn entries(&self) -> Option<&[u64]> {
        match &self.payload {
            Payload::Matrix(m) => Some(m),
            Payload::Map(_) => None,
        }
    }

    /// Whether the underlying function (or linear map) is bijective.
    /// Matrices are tested by exhaustive evaluation; only small ones.
    pub fn is_bijective(&self) -> bool {
        match &self.payload {
            Payload::Map(m) => {
                let mut seen = vec![false; self.cod.size()];
                m.len() == self.cod.size()
                    && m.iter().all(|&i| !std::mem::replace(&mut seen[i as usize], true))
            }
            Payload::Matrix(_) => {
                let Obj::MatMod { dim: n, modulus } = self.dom else { return false };
                if n != self.cod.size() {
                    return false;
                }
                let total = (modulus as usize).pow(n as u32);
                let mut seen = vec![false; total];
                for code in 0..total {
                    let v = decode(code, n, modulus);
                    let image = encode(&self.apply_vec(&v), modulus);
                    if std::mem::replace(&mut seen[image], true) {
                        return false;
                    }
                }
                true
            }
        }
    }

    fn apply_vec(&self, v: &[u64]) -> Vec<u64> {
        let Payload::Matrix(a) = &self.payload else { unreachable!() };
        let (n, m) = (self.dom.size(), match self.dom {
            Obj::MatMod { modulus, .. } => modulus,
            _ => unreachable!(),
        });
        (0..self.cod.size())
            .map(|i| (0..n).fold(0, |acc, j| mul_add_mod(acc, a[i * n + j], v[j], m)))
            .collect()
    }
}

fn mul_add_mod(acc: u64, x: u64, y: u64, m: u64) -> u64 {
    ((acc as u128 + x as u128 * y as u128) % m as u128) as u64
}

fn decode(mut code: usize, n: usize, m: u64) -> Vec<u64> {
    let mut v = vec![0; n];
    for x in v.iter_mut() {
        *x = (code % m as usize) as u64;
        code /= m as usize;
    }
    v
}

fn encode(v: &[u64], m: u64) -> usize {
    v.iter().rev().fold(0, |acc, &x| acc * m as usize + x as usize)
}

/// The identity on `x`.
pub fn identity(x: &Obj) -> Mor {
    match x {
        Obj::FinSet(p) => Mor {
            dom: x.clone(),
            cod: x.clone(),
            payload: Payload::Map((0..p.len() as u32).collect()),
        },
        Obj::MatMod { dim, .. } => {
            let mut e = vec![0; dim * dim];
            for i in 0..*dim {
                e[i * dim + i] = 1;
            }
            Mor {
                dom: x.clone(),
                cod: x.clone(),
                payload: Payload::Matrix(e.into()),
            }
        }
    }
}

/// `g ∘ f`, defined when `cod(f) = dom(g)`.
pub fn compose(g: &Mor, f: &Mor) -> Result<Mor> {
    if f.cod != g.dom {
        return Err(Error::Composition);
    }
    let payload = match (&g.payload, &f.payload) {
        (Payload::Map(gm), Payload::Map(fm)) => {
            Payload::Map(fm.iter().map(|&i| gm[i as usize]).collect())
        }
        (Payload::Matrix(ga), Payload::Matrix(fa)) => {
            let Obj::MatMod { modulus: m, .. } = f.dom else { unreachable!() };
            let (n, k, r) = (f.dom.size(), f.cod.size(), g.cod.size());
            let mut out = vec![0u64; r * n];
            for i in 0..r {
                for j in 0..n {
                    let mut acc = 0u64;
                    for t in 0..k {
                        acc = mul_add_mod(acc, ga[i * k + t], fa[t * n + j], m);
                    }
                    out[i * n + j] = acc;
                }
            }
            Payload::Matrix(out.into())
        }
        _ => return Err(Error::Composition),
    };
    Ok(Mor {
        dom: f.dom.clone(),
        cod: g.cod.clone(),
        payload,
    })
}

/// Structural equality of morphisms, including boundaries.
pub fn mor_eq(f: &Mor, g: &Mor) -> bool {
    f == g
}

/// Check `g ∘ f == h` without keeping the composite.
pub(crate) fn composite_eq(g: &Mor, f: &Mor, h: &Mor) -> bool {
    if f.cod != g.dom || f.dom != h.dom || g.cod != h.cod {
        return false;
    }
    match (&g.payload, &f.payload, &h.payload) {
        (Payload::Map(gm), Payload::Map(fm), Payload::Map(hm)) => {
            fm.iter().zip(hm.iter()).all(|(&i, &t)| gm[i as usize] == t)
        }
        _ => compose(g, f).is_ok_and(|c| c == *h),
    }
}

/// Every morphism `dom -> cod`, or `None` when there are more than `limit`.
pub fn hom_set(dom: &Obj, cod: &Obj, limit: usize) -> Option<Vec<Mor>> {
    let (slots, base) = match (dom, cod) {
        (Obj::FinSet(d), Obj::FinSet(c)) => (d.len(), c.len() as u64),
        (Obj::MatMod { dim: n, modulus: m }, Obj::MatMod { dim: r, modulus: m2 }) if m == m2 => (n * r, *m),
        _ => return Some(Vec::new()),
    };
    let count = (base as u128).checked_pow(slots as u32)?;
    if count > limit as u128 {
        return None;
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut digits = vec![0u64; slots];
    for _ in 0..count {
        let m = match dom {
            Obj::FinSet(_) => Mor::map(dom.clone(), cod.clone(), digits.iter().map(|&d| d as u32).collect()),
            Obj::MatMod { .. } => Mor::matrix(dom.clone(), cod.clone(), digits.clone()),
        };
        out.push(m.expect("digits are in range"));
        for d in digits.iter_mut() {
            *d += 1;
            if *d < base {
                break;
            }
            *d = 0;
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hom_set_sizes() {
        let two = Obj::finset(["a", "b"]).unwrap();
        let three = Obj::finset(["x", "y", "z"]).unwrap();
        assert_eq!(hom_set(&two, &three, 100).unwrap().len(), 9);
        assert_eq!(hom_set(&three, &two, 100).unwrap().len(), 8);
        assert!(hom_set(&three, &three, 10).is_none());
        let v = Obj::matmod(1, 5).unwrap();
        assert_eq!(hom_set(&v, &v, 100).unwrap().len(), 5);
        let empty = Obj::finset(Vec::<String>::new()).unwrap();
        assert_eq!(hom_set(&empty, &two, 100).unwrap().len(), 1);
    }

    fn set(labels: &[&str]) -> Obj {
        Obj::finset(labels.iter().copied()).unwrap()
    }

    #[test]
    fn identity_examples() {
        let x = set(&["p", "q"]);
        assert_eq!(identity(&x).images().unwrap(), &[0, 1]);
        let v = Obj::matmod(2, 5).unwrap();
        assert_eq!(identity(&v).entries().unwrap(), &[1, 0, 0, 1]);
    }

    #[test]
    fn compose_examples() {
        let d = set(&["1", "2"]);
        let a = set(&["a"]);
        let xy = set(&["x", "y"]);
        let f = Mor::map(d.clone(), a.clone(), vec![0, 0]).unwrap();
        let g = Mor::map(a, xy.clone(), vec![0]).unwrap();
        let gf = compose(&g, &f).unwrap();
        assert_eq!(gf, Mor::map(d, xy, vec![0, 0]).unwrap());

        let one = Obj::matmod(1, 5).unwrap();
        let two = Mor::matrix(one.clone(), one.clone(), vec![2]).unwrap();
        let three = Mor::matrix(one.clone(), one.clone(), vec![3]).unwrap();
        assert_eq!(compose(&two, &three).unwrap().entries().unwrap(), &[1]);

        assert_eq!(compose(&f, &f), Err(Error::Composition));
    }

    #[test]
    fn equality_examples() {
        let one = set(&["1"]);
        let ab = set(&["a", "b"]);
        let ca = Mor::map(one.clone(), ab.clone(), vec![0]).unwrap();
        let cb = Mor::map(one, ab, vec![1]).unwrap();
        assert!(mor_eq(&ca, &ca));
        assert!(!mor_eq(&ca, &cb));
        let v = Obj::matmod(1, 5).unwrap();
        let m1 = Mor::matrix(v.clone(), v.clone(), vec![7]).unwrap();
        let m2 = Mor::matrix(v.clone(), v, vec![2]).unwrap();
        assert!(mor_eq(&m1, &m2));
    }

    #[test]
    fn malformed_inputs() {
        let ab = set(&["a", "b"]);
        assert!(Mor::map(ab.clone(), ab.clone(), vec![0]).is_err());
        assert!(Mor::map(ab.clone(), ab, vec![0, 2]).is_err());
        assert!(Obj::finset(["a", "a"]).is_err());
        assert!(Obj::matmod(2, 1).is_err());
    }

    #[test]
    fn bijectivity() {
        let ab = set(&["a", "b"]);
        assert!(Mor::map(ab.clone(), ab.clone(), vec![1, 0]).unwrap().is_bijective());
        assert!(!Mor::map(ab.clone(), ab, vec![1, 1]).unwrap().is_bijective());
        let v = Obj::matmod(2, 3).unwrap();
        assert!(Mor::matrix(v.clone(), v.clone(), vec![1, 1, 0, 1]).unwrap().is_bijective());
        assert!(!Mor::matrix(v.clone(), v, vec![1, 1, 1, 1]).unwrap().is_bijective());
    }

    // Composable triples h∘g∘f over random objects of either backend.
    fn arb_triple() -> impl Strategy<Value = (Mor, Mor, Mor)> {
        let finset = (1usize..5, 1usize..5, 1usize..5, 1usize..5).prop_flat_map(|(a, b, c, d)| {
            (
                proptest::collection::vec(0..b as u32, a),
                proptest::collection::vec(0..c as u32, b),
                proptest::collection::vec(0..d as u32, c),
            )
                .prop_map(move |(f, g, h)| {
                    let obj = |n: usize, tag: &str| Obj::finset((0..n).map(|i| format!("{tag}{i}"))).unwrap();
                    (
                        Mor::map(obj(a, "a"), obj(b, "b"), f).unwrap(),
                        Mor::map(obj(b, "b"), obj(c, "c"), g).unwrap(),
                        Mor::map(obj(c, "c"), obj(d, "d"), h).unwrap(),
                    )
                })
        });
        let matmod = (0usize..4, 0usize..4, 0usize..4, 0usize..4, prop_oneof![Just(2u64), Just(5), Just(6)])
            .prop_flat_map(|(a, b, c, d, m)| {
                (
                    proptest::collection::vec(0..m, a * b),
                    proptest::collection::vec(0..m, b * c),
                    proptest::collection::vec(0..m, c * d),
                )
                    .prop_map(move |(f, g, h)| {
                        let o = |n| Obj::matmod(n, m).unwrap();
                        (
                            Mor::matrix(o(a), o(b), f).unwrap(),
                            Mor::matrix(o(b), o(c), g).unwrap(),
                            Mor::matrix(o(c), o(d), h).unwrap(),
                        )
                    })
            });
        prop_oneof![finset, matmod]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn unit_and_associativity((f, g, h) in arb_triple()) {
            prop_assert_eq!(compose(&f, &identity(f.dom())).unwrap(), f.clone());
            prop_assert_eq!(compose(&identity(f.cod()), &f).unwrap(), f.clone());
            let left = compose(&h, &compose(&g, &f).unwrap()).unwrap();
            let right = compose(&compose(&h, &g).unwrap(), &f).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn composite_eq_matches_compose((f, g, h) in arb_triple()) {
            let gf = compose(&g, &f).unwrap();
            prop_assert!(composite_eq(&g, &f, &gf));
            let hg = compose(&h, &g).unwrap();
            prop_assert!(composite_eq(&h, &g, &hg));
        }
    }
}
