//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p prokit-cli --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use prokit_cli::doc::{canonical, parse, MorphismDocument, SystemDocument};
use prokit_cli::report::{without_timing, Report};
use prokit_core::dmorphism::{compose, d_equiv, extract_pro_iso, level_reindex, make_special, verify_iso_pair};
use prokit_core::fuzz::{
    connector_pool, gen_coboundary_morphism, gen_coboundary_system, gen_directed_poset, gen_planted_level_iso,
    gen_planted_sequence, oracle_min_commutation, CoboundarySystem, DelayProfile, GenBackend, PlantSpec,
};
use prokit_core::indexset::{self, max_of};
use prokit_core::system::{check_strict, commutative_extract, mardesic_reindex, min_commutation_index};
use prokit_core::{DelayMorphism, DelaySystem, IndexPoset, Key};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn nat(n: u64) -> Key {
    Key::Nat(n)
}

const FIN6: GenBackend = GenBackend::FinSet { max_points: 6 };

/// Every triple `a <= b <= c` of `keys` commutes in `s`.
fn triples_commute(s: &DelaySystem, keys: &[Key]) -> Result<(), String> {
    for (i, a) in keys.iter().enumerate() {
        for (j, b) in keys.iter().enumerate().skip(i) {
            for c in keys.iter().skip(j) {
                let lhs = prokit_core::compose(&s.bond(a, b).unwrap(), &s.bond(b, c).unwrap()).unwrap();
                ensure(lhs == s.bond(a, c).unwrap(), || format!("triple ({a},{b},{c}) does not commute"))?;
            }
        }
    }
    Ok(())
}

fn oracle_agreement() -> Outcome {
    let mut compared = 0;
    for seed in 0..200u64 {
        let spec = PlantSpec::new(64, FIN6, seed).with_profile(DelayProfile::Random { max_extra: 8 });
        let delays = spec.delays().map_err(|e| e.to_string())?;
        let s = gen_planted_sequence(&spec).map_err(|e| e.to_string())?;
        for a in 0..=32u64 {
            let v = min_commutation_index(&s, &nat(a), 64).map_err(|e| e.to_string())?;
            let engine = v.is_holds().then(|| v.witnesses[0].chosen[0].clone());
            let oracle = oracle_min_commutation(&s, &nat(a), 64);
            ensure(engine == oracle, || format!("seed {seed} index {a}: engine {engine:?} oracle {oracle:?}"))?;
            ensure(oracle == Some(nat(delays[a as usize])), || {
                format!("seed {seed} index {a}: oracle {oracle:?} planted {}", delays[a as usize])
            })?;
            compared += 1;
        }
    }
    Ok(format!("{compared} indices over 200 seeds agree"))
}

fn countable_extraction() -> Outcome {
    let mut longest = 0;
    for seed in 0..100u64 {
        let spec = PlantSpec::new(64, FIN6, seed).with_profile(DelayProfile::Random { max_extra: 6 });
        let s = gen_planted_sequence(&spec).map_err(|e| e.to_string())?;
        let e = commutative_extract(&s, 64).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(e.strict.holds_exactly(), || format!("seed {seed}: strict verdict {:?}", e.strict.status))?;
        ensure(
            check_strict(&e.restriction.system, 64).map_err(|e| e.to_string())?.holds_exactly(),
            || format!("seed {seed}: restricted system not exactly strict"),
        )?;
        triples_commute(&s, &e.chain).map_err(|m| format!("seed {seed}: {m}"))?;
        let r = &e.restriction;
        let iso = verify_iso_pair(&r.include, &r.retract, 64).map_err(|e| e.to_string())?;
        ensure(iso.is_holds(), || format!("seed {seed}: iso pair {:?}", iso.status))?;
        longest = longest.max(e.chain.len());
    }
    Ok(format!("100 chains strict, iso pairs hold (longest chain {longest})"))
}

/// Nonempty subsets with a greatest element, by bitmask.
fn brute_mardesic_count(p: &IndexPoset, elems: &[Key]) -> usize {
    let n = elems.len();
    (1u32..(1 << n))
        .filter(|mask| {
            let members: Vec<&Key> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| &elems[i]).collect();
            members.iter().any(|m| members.iter().all(|x| p.leq(x, m)))
        })
        .count()
}

fn mardesic_reindexing() -> Outcome {
    let mut total = 0;
    for seed in 0..100u64 {
        let p = gen_directed_poset(seed, 5).map_err(|e| e.to_string())?;
        let elems = p.window_keys(64);
        let m = indexset::mardesic(&p).map_err(|e| e.to_string())?;
        let mk = m.window_keys(1 << 10);
        ensure(mk.len() == brute_mardesic_count(&p, &elems), || format!("seed {seed}: element count"))?;
        total += mk.len();
        let h = 1 << 10;
        ensure(indexset::is_directed(&m, h).holds_exactly(), || format!("seed {seed}: not directed"))?;
        ensure(
            indexset::is_cofinite(&m, h).map_err(|e| e.to_string())?.holds_exactly(),
            || format!("seed {seed}: not cofinite"),
        )?;
        ensure(indexset::is_antisymmetric(&m, h).holds_exactly(), || format!("seed {seed}: not antisymmetric"))?;
        for s in &mk {
            for t in &mk {
                if m.leq(s, t) {
                    let (ms, mt) = (max_of(&p, s.as_set().unwrap()), max_of(&p, t.as_set().unwrap()));
                    ensure(p.leq(ms.as_ref().unwrap(), mt.as_ref().unwrap()), || {
                        format!("seed {seed}: max not monotone on {s} <= {t}")
                    })?;
                }
            }
        }
        let x = gen_coboundary_system(&p, 5, true, seed).map_err(|e| e.to_string())?;
        let r = mardesic_reindex(&x.system).map_err(|e| e.to_string())?;
        let iso = verify_iso_pair(&r.to_reindexed, &r.from_reindexed, h).map_err(|e| e.to_string())?;
        ensure(iso.holds_exactly(), || format!("seed {seed}: iso pair {:?}", iso.status))?;
    }
    Ok(format!("100 posets, {total} reindexed elements, all exact"))
}

fn family(seed: u64, noisy: bool) -> Result<(CoboundarySystem, CoboundarySystem), String> {
    let a = gen_directed_poset(seed, 5).map_err(|e| e.to_string())?;
    let b = gen_directed_poset(seed.wrapping_mul(31).wrapping_add(1), 5).map_err(|e| e.to_string())?;
    Ok((
        gen_coboundary_system(&a, 5, noisy, seed ^ 0x51).map_err(|e| e.to_string())?,
        gen_coboundary_system(&b, 5, noisy, seed ^ 0xa3).map_err(|e| e.to_string())?,
    ))
}

fn level_morphisms() -> Outcome {
    let h = 64;
    let mut pairs = 0;
    for seed in 0..50u64 {
        let (x, y) = family(seed, false)?;
        for s in [&x.system, &y.system] {
            ensure(check_strict(s, h).map_err(|e| e.to_string())?.holds_exactly(), || {
                format!("seed {seed}: generated system not strict")
            })?;
        }
        let c = connector_pool(&x, &y, 1, seed).remove(0);
        let m = gen_coboundary_morphism(&x, &y, &c, false, true, seed).map_err(|e| e.to_string())?;
        let sp = make_special(&m, h).map_err(|e| format!("seed {seed}: {e}"))?;
        let pkg = level_reindex(&sp, h).map_err(|e| format!("seed {seed}: {e}"))?;
        let w = pkg.index.window_keys(h);
        ensure(pkg.index.window_complete(h), || format!("seed {seed}: pair index not finite"))?;
        for p in &w {
            let (a1, b1) = p.as_pair().unwrap();
            ensure(x.system.index().leq(sp.index_at(b1).as_ref().unwrap(), a1), || {
                format!("seed {seed}: {p} violates f(b) <= a")
            })?;
            for q in &w {
                let (a2, b2) = q.as_pair().unwrap();
                let componentwise = x.system.index().leq(a1, a2) && y.system.index().leq(b1, b2);
                ensure(pkg.index.leq(p, q) == componentwise, || format!("seed {seed}: order at {p}, {q}"))?;
            }
        }
        ensure(pkg.square.holds_exactly(), || format!("seed {seed}: square {:?}", pkg.square.status))?;
        pairs += w.len();
    }
    Ok(format!("50 morphisms levelled, {pairs} index pairs checked, squares exact"))
}

fn pro_iso_extraction() -> Outcome {
    let h = 64;
    let mut starts = Vec::new();
    for seed in 0..50u64 {
        let delay = [0u64, 2, 3, 4, 5, 6, 7, 8][(seed % 8) as usize];
        let spec = PlantSpec::new(48, FIN6, seed).with_morphism_delay(delay);
        let p = gen_planted_level_iso(&spec).map_err(|e| e.to_string())?;
        let e = extract_pro_iso(&p.morphism, Some(&p.inverse), h).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(e.chain[0] >= nat(delay), || format!("seed {seed}: chain starts at {}", e.chain[0]))?;
        for v in [&e.source_strict, &e.target_strict, &e.squares] {
            ensure(v.is_holds(), || format!("seed {seed}: {:?}", v.counterexample))?;
        }
        // exhaustive scan on the chain, independent of the library verdicts
        triples_commute(&p.source, &e.chain).map_err(|m| format!("seed {seed} source: {m}"))?;
        triples_commute(&p.target, &e.chain).map_err(|m| format!("seed {seed} target: {m}"))?;
        for (i, c) in e.chain.iter().enumerate() {
            for d in &e.chain[i..] {
                let lhs = prokit_core::compose(&p.target.bond(c, d).unwrap(), &p.morphism.component(d).unwrap());
                let rhs = prokit_core::compose(&p.morphism.component(c).unwrap(), &p.source.bond(c, d).unwrap());
                ensure(lhs.unwrap() == rhs.unwrap(), || format!("seed {seed}: square ({c},{d})"))?;
            }
        }
        let iso = e.iso.as_ref().ok_or("no iso verdict")?;
        ensure(iso.is_holds(), || format!("seed {seed}: iso pair {:?}", iso.status))?;
        starts.push(e.chain[0].as_nat().unwrap_or(0));
    }
    Ok(format!(
        "50 level isos, chain starts {}..={}",
        starts.iter().min().unwrap(),
        starts.iter().max().unwrap()
    ))
}

fn equivalence_laws() -> Outcome {
    let h = 64;
    let eq = |a: &DelayMorphism, b: &DelayMorphism| -> Result<bool, String> {
        let v = d_equiv(a, b, h).map_err(|e| e.to_string())?;
        ensure(v.mode.is_exact(), || "windowed d_equiv on a finite system".into())?;
        Ok(v.is_holds())
    };
    let (mut sampled, mut triples, mut quads, mut positives) = (0, 0, 0, 0);
    for seed in 0..100u64 {
        let (x, y) = family(seed, true)?;
        let z = gen_coboundary_system(&gen_directed_poset(seed ^ 0x77, 5).map_err(|e| e.to_string())?, 5, true, seed)
            .map_err(|e| e.to_string())?;
        let pool = connector_pool(&x, &y, 2, seed);
        let ms: Vec<DelayMorphism> = (0..5u64)
            .map(|i| gen_coboundary_morphism(&x, &y, &pool[(i % 2) as usize], i == 4, true, seed * 7 + i))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        for m in &ms {
            ensure(eq(m, m)?, || format!("seed {seed}: not reflexive"))?;
            sampled += 1;
        }
        for a in &ms {
            for b in &ms {
                ensure(eq(a, b)? == eq(b, a)?, || format!("seed {seed}: not symmetric"))?;
            }
        }
        for t in 0..2 {
            let (a, b, c) = (&ms[t], &ms[t + 2], &ms[(t + 4) % 5]);
            if eq(a, b)? && eq(b, c)? {
                positives += 1;
                ensure(eq(a, c)?, || format!("seed {seed}: not transitive"))?;
            }
            triples += 1;
        }
        // f ~ f' and g ~ g' give g f ~ g' f'
        let gpool = connector_pool(&y, &z, 1, seed ^ 0xbeef);
        let g = gen_coboundary_morphism(&y, &z, &gpool[0], false, true, seed ^ 1).map_err(|e| e.to_string())?;
        let g2 = gen_coboundary_morphism(&y, &z, &gpool[0], true, true, seed ^ 2).map_err(|e| e.to_string())?;
        let (f, f2) = (&ms[0], &ms[2]);
        ensure(eq(f, f2)? && eq(&g, &g2)?, || format!("seed {seed}: planted pairs not equivalent"))?;
        let gf = compose(&g, f).map_err(|e| e.to_string())?;
        let gf2 = compose(&g2, f2).map_err(|e| e.to_string())?;
        ensure(eq(&gf, &gf2)?, || format!("seed {seed}: not a congruence"))?;
        quads += 1;
    }
    Ok(format!(
        "{sampled} morphisms reflexive/symmetric, {triples} triples ({positives} with both links), {quads} quadruples"
    ))
}

fn cli_determinism() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus");
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    for f in &files {
        let text = std::fs::read_to_string(f).map_err(|e| e.to_string())?;
        let again = match parse::<SystemDocument>(&text) {
            Ok(d) => {
                ensure(parse::<SystemDocument>(&canonical(&d)).ok() == Some(d.clone()), || "reparse".into())?;
                canonical(&d)
            }
            Err(_) => {
                let d: MorphismDocument = parse(&text).map_err(|e| format!("{}: {e}", f.display()))?;
                ensure(parse::<MorphismDocument>(&canonical(&d)).ok() == Some(d.clone()), || "reparse".into())?;
                canonical(&d)
            }
        };
        ensure(again == text, || format!("{} is not byte-stable", f.display()))?;
    }
    let run = |args: &[&str]| -> Result<Report, String> {
        let mut all = vec!["prokit"];
        all.extend_from_slice(args);
        let out = prokit_cli::run(all, None);
        serde_json::from_str(&out.stdout).map_err(|e| e.to_string())
    };
    let file = |n: &str| dir.join(n).to_string_lossy().into_owned();
    let (planted, shift, iso) = (file("nat_planted.json"), file("nat_shift2.json"), file("morphism_planted_iso.json"));
    let invocations: Vec<Vec<&str>> = vec![
        vec!["fuzz", "--seeds", "30"],
        vec!["fuzz", "--seeds", "10", "--backend", "matmod"],
        vec!["check", &planted],
        vec!["reduce", &shift, "--op", "extract"],
        vec!["morphism", &iso, "--op", "extract-iso"],
    ];
    for args in &invocations {
        let (a, b) = (run(args)?, run(args)?);
        ensure(
            canonical(&without_timing(a)) == canonical(&without_timing(b)),
            || format!("{args:?} differs between runs"),
        )?;
    }
    Ok(format!("{} documents byte-stable, {} invocations repeat", files.len(), invocations.len()))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("oracle agreement", oracle_agreement),
        ("countable extraction", countable_extraction),
        ("Mardesic reindexing", mardesic_reindexing),
        ("level morphisms", level_morphisms),
        ("pro-isomorphism extraction", pro_iso_extraction),
        ("equivalence laws", equivalence_laws),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(msg) => println!("PASS criterion {} ({name}): {msg} [{secs:.2}s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {msg} [{secs:.2}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
