//! Seeded generators with planted ground truth, and brute-force oracles.
//!
//! Planted sequences start from a strictly commutative sequence
//! `s(a,b) = e_a ∘ ... ∘ e_{b-1}` and perturb bonds `bond(a,b)` with
//! `a < b < delay(a)` so that the middle index `delay(a) - 1` is bad while
//! every middle index `>= delay(a)` stays good. A perturbation `P` of
//! `bond(a,b)` keeps `e_{a-1} ∘ P = e_{a-1} ∘ s(a,b)`, so composites based
//! below `a` cannot see it.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::category::{compose, identity, Mor, Obj};
use crate::dmorphism::DelayMorphism;
use crate::error::{Error, Result};
use crate::indexset::{IndexPoset, Key};
use crate::system::{DelaySystem, SequenceMaterial};

/// Which objects a generator produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GenBackend {
    /// Finite sets of at most `max_points` points.
    FinSet { max_points: usize },
    /// `(Z/modulus)^dim`.
    MatMod { modulus: u64, dim: usize },
}

/// Intended minimal commutation index of every `a < length`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DelayProfile {
    /// `delay(a) = a`.
    #[default]
    Strict,
    /// `delay(a) = a + by`, or `a` where that would leave the sequence.
    Shift { by: u64 },
    /// Explicit values; indices past the table are strict.
    Table { delays: Vec<u64> },
    /// Per index, `a` or a value in `a+2 ..= a+max_extra`, drawn from the seed.
    Random { max_extra: u64 },
}


#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantSpec {
    pub length: usize,
    pub backend: GenBackend,
    #[serde(default)]
    pub delay_profile: DelayProfile,
    /// Square index of `0` for planted level isomorphisms.
    #[serde(default)]
    pub morphism_delay: u64,
    pub seed: u64,
}

impl PlantSpec {
    pub fn new(length: usize, backend: GenBackend, seed: u64) -> Self {
        PlantSpec {
            length,
            backend,
            delay_profile: DelayProfile::Strict,
            morphism_delay: 0,
            seed,
        }
    }

    pub fn with_profile(mut self, profile: DelayProfile) -> Self {
        self.delay_profile = profile;
        self
    }

    pub fn with_morphism_delay(mut self, delay: u64) -> Self {
        self.morphism_delay = delay;
        self
    }

    /// The delay of every index below `length`.
    ///
    /// `delay(a) = a + 1` is rejected: the middle index `a` always commutes
    /// because `bond(a,a)` is the identity, so that value is unrealizable.
    pub fn delays(&self) -> Result<Vec<u64>> {
        let len = self.length as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x5eed_de1a_f11e_0001);
        let out: Vec<u64> = (0..len)
            .map(|a| match &self.delay_profile {
                DelayProfile::Strict => a,
                DelayProfile::Shift { by } if a + by < len => a + by,
                DelayProfile::Shift { .. } => a,
                DelayProfile::Table { delays } => delays.get(a as usize).copied().unwrap_or(a),
                DelayProfile::Random { max_extra } => {
                    let hi = (a + max_extra).min(len - 1);
                    if hi < a + 2 || rng.gen_bool(0.3) {
                        a
                    } else {
                        rng.gen_range(a + 2..=hi)
                    }
                }
            })
            .collect();
        for (a, &d) in out.iter().enumerate() {
            let a = a as u64;
            if d < a || d >= len.max(1) {
                return Err(Error::Generation(format!("delay({a}) = {d} outside {a}..{len}")));
            }
            if d == a + 1 {
                return Err(Error::Generation(format!("delay({a}) = {d} is not realizable")));
            }
        }
        Ok(out)
    }
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn points(n: usize) -> Obj {
    Obj::finset((0..n).map(|i| format!("p{i}"))).expect("distinct labels")
}

/// The strict bond table `s(a, a+k)` from adjacent maps `e_n: X_{n+1} -> X_n`.
fn strict_table(objects: &[Obj], adjacent: &[Mor]) -> Result<Vec<Vec<Mor>>> {
    let n = objects.len();
    let mut bonds = Vec::with_capacity(n);
    for a in 0..n {
        let mut row = vec![identity(&objects[a])];
        for b in a + 1..n {
            let next = compose(row.last().expect("nonempty"), &adjacent[b - 1])?;
            row.push(next);
        }
        bonds.push(row);
    }
    Ok(bonds)
}

/// Objects and adjacent maps of a strict sequence, plus what the planter
/// needs to perturb it.
struct StrictParts {
    objects: Vec<Obj>,
    adjacent: Vec<Mor>,
    twin: Twin,
}

/// How a bond may be perturbed without changing `e_{a-1} ∘ bond`.
enum Twin {
    /// Objects have an even number of points and adjacent maps are constant
    /// on the pairs `{2i, 2i+1}`.
    Pairs,
    /// `e_n = σ_n E σ_{n+1}^{-1}` with `E = diag(1,…,1,0)`; the perturbation
    /// is `σ_a e_last u^T σ_b^{-1}`.
    Coboundary { sigma: Vec<Mor>, sigma_inv: Vec<Mor> },
}

fn strict_parts(spec: &PlantSpec, rng: &mut ChaCha8Rng) -> Result<StrictParts> {
    let len = spec.length;
    if len == 0 {
        return Err(Error::Generation("length must be at least 1".into()));
    }
    match spec.backend {
        GenBackend::FinSet { max_points } => {
            if max_points < 2 {
                return Err(Error::Generation("objects need at least 2 points".into()));
            }
            let halves: Vec<usize> = (0..len).map(|_| rng.gen_range(1..=max_points / 2)).collect();
            let objects: Vec<Obj> = halves.iter().map(|h| points(2 * h)).collect();
            let mut adjacent = Vec::with_capacity(len.saturating_sub(1));
            for n in 0..len.saturating_sub(1) {
                let on_pairs: Vec<u32> = (0..halves[n + 1])
                    .map(|_| rng.gen_range(0..2 * halves[n]) as u32)
                    .collect();
                let images = (0..2 * halves[n + 1]).map(|y| on_pairs[y / 2]).collect();
                adjacent.push(Mor::map(objects[n + 1].clone(), objects[n].clone(), images)?);
            }
            Ok(StrictParts {
                objects,
                adjacent,
                twin: Twin::Pairs,
            })
        }
        GenBackend::MatMod { modulus, dim } => {
            if dim < 2 {
                return Err(Error::Generation("matrix objects need dimension at least 2".into()));
            }
            let obj = Obj::matmod(dim, modulus)?;
            let mut idem = identity(&obj).entries().expect("matrix").to_vec();
            idem[dim * dim - 1] = 0;
            let idem = Mor::matrix(obj.clone(), obj.clone(), idem)?;
            let (sigma, sigma_inv): (Vec<Mor>, Vec<Mor>) =
                (0..len).map(|_| random_invertible(&obj, rng)).collect::<Result<Vec<_>>>()?.into_iter().unzip();
            let mut adjacent = Vec::with_capacity(len.saturating_sub(1));
            for n in 0..len.saturating_sub(1) {
                adjacent.push(compose(&compose(&sigma[n], &idem)?, &sigma_inv[n + 1])?);
            }
            Ok(StrictParts {
                objects: vec![obj; len],
                adjacent,
                twin: Twin::Coboundary { sigma, sigma_inv },
            })
        }
    }
}

/// A random matrix of determinant `±1` and its inverse, from row operations.
fn random_invertible(obj: &Obj, rng: &mut ChaCha8Rng) -> Result<(Mor, Mor)> {
    let Obj::MatMod { dim, modulus } = *obj else {
        return Err(Error::Generation("not a matrix object".into()));
    };
    let mut m = identity(obj);
    let mut inv = identity(obj);
    for _ in 0..3 * dim {
        let i = rng.gen_range(0..dim);
        let mut j = rng.gen_range(0..dim - 1);
        if j >= i {
            j += 1;
        }
        let c = rng.gen_range(1..modulus);
        // E = I + c·e_i e_j^T, E^{-1} = I - c·e_i e_j^T
        let mut e = identity(obj).entries().expect("matrix").to_vec();
        e[i * dim + j] = c;
        let mut e_inv = identity(obj).entries().expect("matrix").to_vec();
        e_inv[i * dim + j] = modulus - c;
        m = compose(&Mor::matrix(obj.clone(), obj.clone(), e)?, &m)?;
        inv = compose(&inv, &Mor::matrix(obj.clone(), obj.clone(), e_inv)?)?;
    }
    Ok((m, inv))
}

/// A strictly commutative `N`-sequence, constant past `length - 1`.
pub fn gen_strict_sequence(spec: &PlantSpec) -> Result<DelaySystem> {
    let material = gen_strict_material(spec)?;
    Ok(DelaySystem::new(IndexPoset::nat(), material))
}

pub fn gen_strict_material(spec: &PlantSpec) -> Result<SequenceMaterial> {
    let mut rng = rng_for(spec.seed);
    let parts = strict_parts(spec, &mut rng)?;
    SequenceMaterial::new(parts.objects.clone(), strict_table(&parts.objects, &parts.adjacent)?)
}

/// A sequence whose minimal commutation index at every `a < length` is
/// `spec.delays()[a]`.
pub fn gen_planted_sequence(spec: &PlantSpec) -> Result<DelaySystem> {
    Ok(DelaySystem::new(IndexPoset::nat(), gen_planted_material(spec)?))
}

pub fn gen_planted_material(spec: &PlantSpec) -> Result<SequenceMaterial> {
    let delays = spec.delays()?;
    let mut rng = rng_for(spec.seed);
    let parts = strict_parts(spec, &mut rng)?;
    let strict = strict_table(&parts.objects, &parts.adjacent)?;
    let mut bonds = strict.clone();
    for (a, &d) in delays.iter().enumerate() {
        let d = d as usize;
        if d == a {
            continue;
        }
        // bad middle index d-1, seen through the clean bond s(d-1, top)
        let top = d.max(delays[d - 1] as usize);
        let through = &strict[d - 1][top - (d - 1)];
        bonds[a][d - 1 - a] = perturb(&parts, &strict[a][d - 1 - a], a, d - 1, Some(through), &mut rng)?;
        for b in a + 1..d - 1 {
            if rng.gen_bool(0.5) {
                bonds[a][b - a] = perturb(&parts, &strict[a][b - a], a, b, None, &mut rng)?;
            }
        }
    }
    SequenceMaterial::new(parts.objects, bonds)
}

/// A perturbation of `bond = s(a,b)` invisible after `e_{a-1}`. With
/// `through = s(b, x)` it also differs from `bond` after `through`.
fn perturb(
    parts: &StrictParts,
    bond: &Mor,
    a: usize,
    b: usize,
    through: Option<&Mor>,
    rng: &mut ChaCha8Rng,
) -> Result<Mor> {
    match &parts.twin {
        Twin::Pairs => {
            let mut images = bond.images().expect("finite map").to_vec();
            let y = match through {
                Some(t) => *t.images().expect("finite map").choose(rng).expect("nonempty"),
                None => rng.gen_range(0..images.len() as u32),
            } as usize;
            images[y] ^= 1;
            Mor::map(bond.dom().clone(), bond.cod().clone(), images)
        }
        Twin::Coboundary { sigma, sigma_inv } => {
            let Obj::MatMod { dim, modulus } = *bond.dom() else {
                unreachable!("coboundary twins are matrices")
            };
            // u has a nonzero entry outside the kernel of E
            let mut u: Vec<u64> = (0..dim).map(|_| rng.gen_range(0..modulus)).collect();
            u[rng.gen_range(0..dim - 1)] = rng.gen_range(1..modulus);
            let mut outer = vec![0u64; dim * dim];
            outer[(dim - 1) * dim..].copy_from_slice(&u);
            let obj = bond.dom().clone();
            let delta = compose(
                &compose(&sigma[a], &Mor::matrix(obj.clone(), obj.clone(), outer)?)?,
                &sigma_inv[b],
            )?;
            let sum: Vec<u64> = bond
                .entries()
                .expect("matrix")
                .iter()
                .zip(delta.entries().expect("matrix"))
                .map(|(x, y)| (x + y) % modulus)
                .collect();
            Mor::matrix(obj.clone(), obj, sum)
        }
    }
}

/// A sequence on which `0` has no commutation index at all: every
/// `bond(0,b)` is the `b`-th power of an involution and all other bonds are
/// identities, so each middle index `m` is bad against `m + 1`.
pub fn gen_adversarial_sequence(backend: GenBackend) -> Result<DelaySystem> {
    let (obj, flip) = match backend {
        GenBackend::FinSet { .. } => {
            let o = points(2);
            (o.clone(), Mor::map(o.clone(), o, vec![1, 0])?)
        }
        GenBackend::MatMod { modulus, .. } => {
            if modulus < 3 {
                return Err(Error::Generation("-1 = 1 modulo 2".into()));
            }
            let o = Obj::matmod(1, modulus)?;
            (o.clone(), Mor::matrix(o.clone(), o, vec![modulus - 1])?)
        }
    };
    let id = identity(&obj);
    let o = obj.clone();
    Ok(DelaySystem::from_fns(
        IndexPoset::nat(),
        move |k| k.as_nat().map(|_| o.clone()),
        move |a, b| {
            let (a, b) = (a.as_nat()?, b.as_nat()?);
            if a > b {
                None
            } else if a == 0 && b % 2 == 1 {
                Some(flip.clone())
            } else {
                Some(id.clone())
            }
        },
    ))
}

/// Brute-force minimal commutation index.
///
/// Candidates are tried in enumeration order; a candidate survives when every
/// triple `(a, a', a'')` with `c <= a' <= a''` in the window composes
/// correctly. Triples are scanned by ascending top and descending middle. A
/// survivor that needed earlier candidates to fail and has nothing above it
/// in the window is not reported, since its check was vacuous.
pub fn oracle_min_commutation(system: &DelaySystem, a: &Key, horizon: usize) -> Option<Key> {
    let idx = system.index();
    let window = idx.window_keys(horizon);
    let above: Vec<&Key> = window.iter().filter(|x| idx.leq(a, x)).collect();
    'candidate: for (ci, c) in above.iter().enumerate() {
        for top in above.iter().filter(|t| idx.leq(c, t)) {
            for mid in above.iter().rev() {
                if !idx.leq(c, mid) || !idx.leq(mid, top) {
                    continue;
                }
                let (Some(p1), Some(p2), Some(p3)) =
                    (system.bond(a, mid), system.bond(mid, top), system.bond(a, top))
                else {
                    continue 'candidate;
                };
                match compose(&p1, &p2) {
                    Ok(m) if m == p3 => {}
                    _ => continue 'candidate,
                }
            }
        }
        if ci > 0 && !window.iter().any(|x| idx.lt(c, x)) {
            return None;
        }
        return Some((*c).clone());
    }
    None
}

/// A level isomorphism between strict sequences and its levelwise inverse.
#[derive(Debug, Clone)]
pub struct PlantedLevelIso {
    pub source: DelaySystem,
    pub target: DelaySystem,
    pub morphism: DelayMorphism,
    pub inverse: DelayMorphism,
}

fn random_map(dom: usize, cod: &[u32], rng: &mut ChaCha8Rng) -> Vec<u32> {
    (0..dom).map(|_| *cod.choose(rng).expect("nonempty codomain")).collect()
}

fn random_perm(n: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let mut p: Vec<u32> = (0..n as u32).collect();
    p.shuffle(rng);
    p
}

fn invert_perm(p: &[u32]) -> Vec<u32> {
    let mut inv = vec![0u32; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j as usize] = i as u32;
    }
    inv
}

/// `Y_n` is a relabelled copy of `X_n` via bijections `φ_n`; components are
/// `f_n = φ_n σ_n` with `σ_n = 1` except `σ_0`, a transposition of a point
/// leaving the bond images at `morphism_delay` with a point outside them.
/// The square index of `0` is therefore exactly `morphism_delay`, and every
/// square based at `n >= 1` commutes. Finite sets only.
pub fn gen_planted_level_iso(spec: &PlantSpec) -> Result<PlantedLevelIso> {
    let GenBackend::FinSet { max_points } = spec.backend else {
        return Err(Error::Generation("planted level isomorphisms need finite sets".into()));
    };
    let (len, delay) = (spec.length, spec.morphism_delay as usize);
    if max_points < 3 {
        return Err(Error::Generation("level isomorphisms need at least 3 points".into()));
    }
    if delay == 1 || (delay > 0 && delay >= len) {
        return Err(Error::Generation(format!(
            "morphism delay {delay} is not realizable at length {len}"
        )));
    }
    let mut rng = rng_for(spec.seed);
    let k = rng.gen_range(3..=max_points);
    let all: Vec<u32> = (0..k as u32).collect();
    let x = points(k);
    let y = Obj::finset((0..k).map(|i| format!("q{i}"))).expect("distinct labels");
    let mut adjacent: Vec<Vec<u32>> = Vec::with_capacity(len.saturating_sub(1));
    let mut sigma0: Vec<u32> = all.clone();
    for n in 0..len.saturating_sub(1) {
        let e = if delay == 0 || n > delay - 1 {
            random_map(k, &all, &mut rng)
        } else if n == 0 {
            // image misses exactly one point
            let missing = rng.gen_range(0..k as u32);
            let mut targets: Vec<u32> = all.iter().copied().filter(|&p| p != missing).collect();
            targets.push(*targets.choose(&mut rng).expect("k >= 3"));
            targets.shuffle(&mut rng);
            targets
        } else if n < delay - 1 {
            random_perm(k, &mut rng)
        } else {
            Vec::new()
        };
        adjacent.push(e);
    }
    if delay >= 2 {
        // p_{0,delay-1} = e_0 ∘ … ∘ e_{delay-2}; e_{delay-1} misses a point
        // with a singleton fibre under it
        let p0 = compose_chain(&adjacent[..delay - 1], k);
        let mut fibre = vec![0usize; k];
        for &i in &p0 {
            fibre[i as usize] += 1;
        }
        let singles: Vec<u32> = (0..k as u32).filter(|&v| fibre[p0[v as usize] as usize] == 1).collect();
        let v = *singles.choose(&mut rng).expect("a k-1 image leaves singleton fibres");
        let rest: Vec<u32> = all.iter().copied().filter(|&q| q != v).collect();
        adjacent[delay - 1] = random_map(k, &rest, &mut rng);
        let u = p0[v as usize];
        let w = (0..k as u32).find(|q| fibre[*q as usize] == 0).expect("image misses a point");
        sigma0.swap(u as usize, w as usize);
    }
    let phis: Vec<Vec<u32>> = (0..len).map(|_| random_perm(k, &mut rng)).collect();

    let x_adj: Vec<Mor> = adjacent
        .iter()
        .map(|e| Mor::map(x.clone(), x.clone(), e.clone()))
        .collect::<Result<_>>()?;
    let y_adj: Vec<Mor> = adjacent
        .iter()
        .enumerate()
        .map(|(n, e)| {
            // φ_n e_n φ_{n+1}^{-1}
            let inv = invert_perm(&phis[n + 1]);
            let images = (0..k).map(|q| phis[n][e[inv[q] as usize] as usize]).collect();
            Mor::map(y.clone(), y.clone(), images)
        })
        .collect::<Result<_>>()?;
    let xs = vec![x.clone(); len];
    let ys = vec![y.clone(); len];
    let source = DelaySystem::new(IndexPoset::nat(), SequenceMaterial::new(xs.clone(), strict_table(&xs, &x_adj)?)?);
    let target = DelaySystem::new(IndexPoset::nat(), SequenceMaterial::new(ys.clone(), strict_table(&ys, &y_adj)?)?);

    let mut forward = Vec::with_capacity(len);
    let mut backward = Vec::with_capacity(len);
    for (n, phi) in phis.iter().enumerate() {
        let images: Vec<u32> = if n == 0 {
            sigma0.iter().map(|&i| phi[i as usize]).collect()
        } else {
            phi.clone()
        };
        backward.push(Mor::map(y.clone(), x.clone(), invert_perm(&images))?);
        forward.push(Mor::map(x.clone(), y.clone(), images)?);
    }
    let clamp = move |c: &Key| c.as_nat().map(|n| (n as usize).min(len - 1));
    let morphism = DelayMorphism::new(
        source.clone(),
        target.clone(),
        |c| c.as_nat().map(Key::Nat),
        move |c| clamp(c).map(|n| forward[n].clone()),
        "planted level",
    );
    let inverse = DelayMorphism::new(
        target.clone(),
        source.clone(),
        |c| c.as_nat().map(Key::Nat),
        move |c| clamp(c).map(|n| backward[n].clone()),
        "planted inverse",
    );
    Ok(PlantedLevelIso {
        source,
        target,
        morphism,
        inverse,
    })
}

/// `e_0 ∘ e_1 ∘ … ∘ e_{m-1}` as an image table on `k` points.
fn compose_chain(maps: &[Vec<u32>], k: usize) -> Vec<u32> {
    (0..k as u32)
        .map(|v| maps.iter().rev().fold(v, |i, e| e[i as usize]))
        .collect()
}

/// A random antisymmetric finite poset on `1..=max_size` elements with a
/// greatest element, hence directed.
pub fn gen_directed_poset(seed: u64, max_size: usize) -> Result<IndexPoset> {
    let mut rng = rng_for(seed);
    let n = rng.gen_range(1..=max_size.max(1));
    let keys: Vec<Key> = (0..n).map(|i| Key::label(format!("a{i}"))).collect();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if j == n - 1 || rng.gen_bool(0.35) {
                pairs.push((keys[i].clone(), keys[j].clone()));
            }
        }
    }
    // shuffle declaration order so enumeration is not always the label order
    let mut declared = keys.clone();
    declared.shuffle(&mut rng);
    IndexPoset::finite(declared, &pairs)
}

/// A finite system with a greatest index `top` whose bonds into `top` are
/// `σ_a e σ_top^{-1}` for permutations `σ_a` and an idempotent `e`.
///
/// With `noisy` set the remaining non-identity bonds are arbitrary maps;
/// the system is still a delay system because every triple with middle
/// index `top` commutes. Without noise it is strict.
#[derive(Debug, Clone)]
pub struct CoboundarySystem {
    pub system: DelaySystem,
    pub top: Key,
    pub points: usize,
    sigma: HashMap<Key, Vec<u32>>,
    sigma_inv: HashMap<Key, Vec<u32>>,
    idempotent: Vec<u32>,
}

impl CoboundarySystem {
    /// The image of the idempotent.
    pub fn core(&self) -> Vec<u32> {
        let mut im: Vec<u32> = self.idempotent.clone();
        im.sort_unstable();
        im.dedup();
        im
    }
}

pub fn gen_coboundary_system(index: &IndexPoset, points_max: usize, noisy: bool, seed: u64) -> Result<CoboundarySystem> {
    let Some(max_rank) = index.max_rank() else {
        return Err(Error::Generation("coboundary systems need a finite index".into()));
    };
    let keys = index.window_keys(max_rank);
    let top = keys
        .iter()
        .find(|m| keys.iter().all(|x| index.leq(x, m)))
        .cloned()
        .ok_or_else(|| Error::Generation("index has no greatest element".into()))?;
    if points_max < 2 {
        return Err(Error::Generation("objects need at least 2 points".into()));
    }
    let mut rng = rng_for(seed);
    let k = rng.gen_range(2..=points_max);
    let rank = rng.gen_range(1..k);
    let mut core: Vec<u32> = (0..k as u32).collect();
    core.shuffle(&mut rng);
    core.truncate(rank);
    let idempotent: Vec<u32> = (0..k as u32)
        .map(|p| if core.contains(&p) { p } else { *core.choose(&mut rng).expect("rank >= 1") })
        .collect();
    let sigma: HashMap<Key, Vec<u32>> = keys.iter().map(|a| (a.clone(), random_perm(k, &mut rng))).collect();
    let sigma_inv: HashMap<Key, Vec<u32>> = sigma.iter().map(|(a, p)| (a.clone(), invert_perm(p))).collect();
    let obj = points(k);
    let all: Vec<u32> = (0..k as u32).collect();
    let mut bonds = HashMap::new();
    for a in &keys {
        for b in &keys {
            if a == b || !index.leq(a, b) {
                continue;
            }
            let images = if noisy && *b != top {
                random_map(k, &all, &mut rng)
            } else {
                // σ_a e σ_b^{-1}
                (0..k).map(|q| sigma[a][idempotent[sigma_inv[b][q] as usize] as usize]).collect()
            };
            bonds.insert((a.clone(), b.clone()), Mor::map(obj.clone(), obj.clone(), images)?);
        }
    }
    let objects = keys.iter().map(|a| (a.clone(), obj.clone())).collect();
    let system = DelaySystem::new(index.clone(), crate::system::TableMaterial { objects, bonds });
    Ok(CoboundarySystem {
        system,
        top,
        points: k,
        sigma,
        sigma_inv,
        idempotent,
    })
}

/// Maps `X -> Y` sending the core of `X` into the core of `Y`.
pub fn connector_pool(x: &CoboundarySystem, y: &CoboundarySystem, size: usize, seed: u64) -> Vec<Vec<u32>> {
    let mut rng = rng_for(seed);
    let (xc, yc) = (x.core(), y.core());
    let all: Vec<u32> = (0..y.points as u32).collect();
    (0..size)
        .map(|_| {
            (0..x.points as u32)
                .map(|p| {
                    if xc.contains(&p) {
                        *yc.choose(&mut rng).expect("nonempty core")
                    } else {
                        *all.choose(&mut rng).expect("nonempty")
                    }
                })
                .collect()
        })
        .collect()
}

/// `f_b = ρ_b ∘ e_Y ∘ connector ∘ e_X ∘ σ_{f(b)}^{-1}`, a delay morphism.
///
/// Two such morphisms with the same connector are d-equivalent. `noisy`
/// rewrites component values off the bond images into `top`, which leaves
/// the d-equivalence class unchanged. With `increasing` the index map is
/// order preserving.
pub fn gen_coboundary_morphism(
    x: &CoboundarySystem,
    y: &CoboundarySystem,
    connector: &[u32],
    increasing: bool,
    noisy: bool,
    seed: u64,
) -> Result<DelayMorphism> {
    let mut rng = rng_for(seed);
    let (ai, bi) = (x.system.index(), y.system.index());
    let wa = ai.window_keys(ai.max_rank().unwrap_or(0));
    let wb = bi.window_keys(bi.max_rank().unwrap_or(0));
    let xcore = x.core();
    let all: Vec<u32> = (0..y.points as u32).collect();
    let mut index = HashMap::new();
    let mut comps = HashMap::new();
    for b in &wb {
        let fb = if increasing {
            let below: Vec<&Key> = wb.iter().filter(|c| *c != b && bi.leq(c, b)).collect();
            let cands: Vec<&Key> = wa
                .iter()
                .filter(|a| below.iter().all(|c| index.get(*c).is_none_or(|fc: &Key| ai.leq(fc, a))))
                .collect();
            (*cands.choose(&mut rng).expect("top bounds everything")).clone()
        } else {
            wa.choose(&mut rng).expect("nonempty").clone()
        };
        let images: Vec<u32> = (0..x.points)
            .map(|q| {
                let pre = x.sigma_inv[&fb][q];
                if noisy && fb != x.top && !xcore.contains(&pre) {
                    *all.choose(&mut rng).expect("nonempty")
                } else {
                    let e = x.idempotent[pre as usize] as usize;
                    y.sigma[b][y.idempotent[connector[e] as usize] as usize]
                }
            })
            .collect();
        comps.insert(b.clone(), Mor::map(points(x.points), points(y.points), images)?);
        index.insert(b.clone(), fb);
    }
    Ok(DelayMorphism::from_tables(
        x.system.clone(),
        y.system.clone(),
        index,
        comps,
        "coboundary",
    ))
}
