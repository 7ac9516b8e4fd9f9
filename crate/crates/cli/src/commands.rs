use std::path::Path;

use prokit_core::dmorphism::{
    check_components, check_delay_morphism, check_special, d_equiv, extract_pro_iso, is_increasing, level_reindex,
    make_special, verify_iso_pair,
};
use prokit_core::fuzz::{gen_planted_sequence, oracle_min_commutation, DelayProfile, GenBackend, PlantSpec};
use prokit_core::system::{
    check_delay, check_strict, check_wellformed, commutative_extract_from, mardesic_reindex, restrict, to_sequence,
};
use prokit_core::{Key, Status, Subset, Verdict};
use serde::Serialize;
use serde_json::json;

use crate::doc::{parse, MorphismDocument, SystemDocument};
use crate::report::{Failure, NamedVerdict};

pub const DEFAULT_HORIZON: usize = 32;

/// What a command produced, before it is wrapped into a report.
#[derive(Default)]
pub struct Body {
    pub horizon: Option<usize>,
    pub verdicts: Vec<NamedVerdict>,
    pub details: Option<serde_json::Value>,
    pub output: Option<SystemDocument>,
    /// Overrides the combined verdict status.
    pub status: Option<Status>,
    pub notes: Vec<String>,
}

impl Body {
    fn push(&mut self, name: &str, verdict: Verdict) {
        self.verdicts.push(NamedVerdict {
            name: name.to_string(),
            verdict,
        });
    }
}

/// Flag, then document, then `PROKIT_HORIZON`, then the default.
pub fn resolve_horizon(flag: Option<usize>, doc: Option<usize>, env: Option<&str>) -> Result<usize, Failure> {
    if let Some(h) = flag.or(doc) {
        return Ok(h);
    }
    match env {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("PROKIT_HORIZON={v:?} is not a non-negative integer"))),
        None => Ok(DEFAULT_HORIZON),
    }
}

pub fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CheckMode {
    Wellformed,
    Delay,
    Strict,
}

pub fn check(path: &Path, mode: CheckMode, flag: Option<usize>, env: Option<&str>) -> Result<Body, Failure> {
    let doc: SystemDocument = parse(&read(path)?)?;
    let h = resolve_horizon(flag, doc.horizon, env)?;
    let s = doc.build()?;
    let mut body = Body {
        horizon: Some(h),
        ..Body::default()
    };
    let wf = check_wellformed(&s, h);
    let broken = wf.is_fails();
    body.push("wellformed", wf);
    if broken {
        return Ok(body);
    }
    match mode {
        CheckMode::Wellformed => {}
        CheckMode::Delay => body.push("delay", check_delay(&s, h)?.to_verdict()),
        CheckMode::Strict => body.push("strict", check_strict(&s, h)?),
    }
    Ok(body)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ReduceOp {
    Restrict,
    Mardesic,
    Sequence,
    Extract,
}

pub struct ReduceArgs<'a> {
    pub op: ReduceOp,
    pub subset: Option<&'a str>,
    pub start: Option<&'a str>,
    pub horizon: Option<usize>,
}

pub fn reduce(path: &Path, args: ReduceArgs<'_>, env: Option<&str>) -> Result<Body, Failure> {
    let doc: SystemDocument = parse(&read(path)?)?;
    let h = resolve_horizon(args.horizon, doc.horizon, env)?;
    let s = doc.build()?;
    let mut body = Body {
        horizon: Some(h),
        ..Body::default()
    };
    let reduced = match args.op {
        ReduceOp::Restrict => {
            let text = args.subset.ok_or_else(|| Failure::usage("--op restrict needs --subset"))?;
            let subset: Subset = text.parse().map_err(Failure::usage)?;
            let r = restrict(&s, subset, h)?;
            body.push("iso_pair", verify_iso_pair(&r.include, &r.retract, h)?);
            body.details = Some(json!({ "subset": text }));
            r.system
        }
        ReduceOp::Mardesic => {
            let r = mardesic_reindex(&s)?;
            body.push("iso_pair", verify_iso_pair(&r.to_reindexed, &r.from_reindexed, h)?);
            let idx = r.system.index();
            body.details = Some(json!({
                "elements_in_window": idx.window_keys(h).len(),
                "window_is_whole_index": idx.window_complete(h),
            }));
            r.system
        }
        ReduceOp::Sequence => {
            let r = to_sequence(&s, h)?;
            let rr = &r.restriction;
            body.push("iso_pair", verify_iso_pair(&rr.include, &rr.retract, h)?);
            body.details = Some(json!({ "chain": keys(&r.chain), "maximum": r.maximum.map(|k| k.to_string()) }));
            r.restriction.system
        }
        ReduceOp::Extract => {
            let start = match args.start {
                Some(t) => t.parse::<Key>().map_err(|e| Failure::usage(e.to_string()))?,
                None => s
                    .index()
                    .window_keys(h)
                    .into_iter()
                    .next()
                    .ok_or_else(|| Failure::usage("empty index"))?,
            };
            let e = commutative_extract_from(&s, &start, h)?;
            body.push("strict", e.strict.clone());
            let r = &e.restriction;
            body.push("iso_pair", verify_iso_pair(&r.include, &r.retract, h)?);
            body.details = Some(json!({ "chain": keys(&e.chain) }));
            e.restriction.system
        }
    };
    body.output = Some(SystemDocument::tabulate(&reduced, h)?);
    Ok(body)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MorphismOp {
    Check,
    Special,
    Level,
    ExtractIso,
    Iso,
}

pub fn morphism(path: &Path, op: MorphismOp, flag: Option<usize>, env: Option<&str>) -> Result<Body, Failure> {
    let doc: MorphismDocument = parse(&read(path)?)?;
    let h = resolve_horizon(flag, doc.horizon, env)?;
    let pair = doc.build()?;
    let m = pair.morphism;
    let mut body = Body {
        horizon: Some(h),
        ..Body::default()
    };
    match op {
        MorphismOp::Check => {
            let comps = check_components(&m, h);
            let broken = comps.is_fails();
            body.push("components", comps);
            if !broken {
                body.push("delay_morphism", check_delay_morphism(&m, h)?);
            }
        }
        MorphismOp::Special => {
            let sp = make_special(&m, h)?;
            body.push("increasing", is_increasing(&sp, h)?);
            body.push("special", check_special(&sp, h)?);
            body.push("equivalent", d_equiv(&m, &sp, h)?);
            let table: Vec<[String; 2]> = m
                .target()
                .index()
                .window_keys(h)
                .into_iter()
                .filter_map(|b| Some([b.to_string(), sp.index_at(&b)?.to_string()]))
                .collect();
            body.details = Some(json!({ "index_map": table }));
        }
        MorphismOp::Level => {
            let sp = if check_special(&m, h)?.is_holds() {
                m.clone()
            } else {
                make_special(&m, h)?
            };
            let pkg = level_reindex(&sp, h)?;
            body.push("square", pkg.square.clone());
            body.details = Some(json!({ "pairs_in_window": pkg.index.window_keys(h).len() }));
        }
        MorphismOp::ExtractIso => {
            let e = extract_pro_iso(&m, pair.inverse.as_ref(), h)?;
            body.push("source_strict", e.source_strict.clone());
            body.push("target_strict", e.target_strict.clone());
            body.push("squares", e.squares.clone());
            if let Some(v) = &e.iso {
                body.push("iso_pair", v.clone());
            }
            body.details = Some(json!({ "chain": keys(&e.chain) }));
        }
        MorphismOp::Iso => {
            let w = pair
                .inverse
                .as_ref()
                .ok_or_else(|| Failure::usage("--op iso needs an `inverse` block"))?;
            body.push("iso_pair", verify_iso_pair(&m, w, h)?);
        }
    }
    Ok(body)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum BackendArg {
    Finset,
    Matmod,
}

pub struct FuzzArgs {
    pub seeds: u64,
    pub first_seed: u64,
    pub len: usize,
    pub backend: BackendArg,
    pub max_points: usize,
    pub modulus: u64,
    pub dim: usize,
    pub max_extra: u64,
    pub horizon: Option<usize>,
    pub inject_fault: bool,
}

#[derive(Debug, Serialize)]
struct Disagreement {
    seed: u64,
    check: &'static str,
    index: Option<String>,
    planted: Option<String>,
    oracle: Option<String>,
    engine: Option<String>,
}

/// Plant, then compare engine, oracle and plant on every seed.
pub fn fuzz(args: &FuzzArgs, env: Option<&str>) -> Result<Body, Failure> {
    if args.seeds == 0 {
        return Err(Failure::usage("--seeds must be at least 1"));
    }
    if args.len == 0 {
        return Err(Failure::usage("--len must be at least 1"));
    }
    let h = resolve_horizon(args.horizon, None, env)?;
    let backend = match args.backend {
        BackendArg::Finset => GenBackend::FinSet {
            max_points: args.max_points,
        },
        BackendArg::Matmod => GenBackend::MatMod {
            modulus: args.modulus,
            dim: args.dim,
        },
    };
    let mut found = Vec::new();
    let mut compared = 0usize;
    for seed in args.first_seed..args.first_seed.saturating_add(args.seeds) {
        let spec = PlantSpec::new(args.len, backend, seed).with_profile(DelayProfile::Random {
            max_extra: args.max_extra,
        });
        let delays = spec.delays()?;
        let s = gen_planted_sequence(&spec)?;
        let report = check_delay(&s, h)?;
        let top = (args.len as u64).min(h as u64 + 1);
        for a in 0..top {
            let key = Key::Nat(a);
            let oracle = oracle_min_commutation(&s, &key, h);
            let mut engine = report
                .entries
                .iter()
                .find(|e| e.element == key && e.status == Status::Holds)
                .and_then(|e| e.witness.clone());
            if args.inject_fault && a == 0 {
                engine = engine.and_then(|k| k.as_nat()).map(|n| Key::Nat(n + 1));
            }
            let planted = (delays[a as usize] < h as u64).then(|| Key::Nat(delays[a as usize]));
            compared += 1;
            if oracle != engine || (planted.is_some() && planted != oracle) {
                found.push(Disagreement {
                    seed,
                    check: "commutation_index",
                    index: Some(key.to_string()),
                    planted: planted.map(|k| k.to_string()),
                    oracle: oracle.map(|k| k.to_string()),
                    engine: engine.map(|k| k.to_string()),
                });
            }
        }
        if let Ok(e) = commutative_extract_from(&s, &Key::Nat(0), h) {
            if e.strict.is_fails() {
                found.push(Disagreement {
                    seed,
                    check: "extraction_strict",
                    index: None,
                    planted: None,
                    oracle: None,
                    engine: Some(keys(&e.chain).join(",")),
                });
            }
        }
    }
    let mut body = Body {
        horizon: Some(h),
        status: Some(if found.is_empty() { Status::Holds } else { Status::Fails }),
        ..Body::default()
    };
    if let Some(first) = found.first() {
        body.notes.push(format!(
            "seed {}: {} disagreement at {} (planted {:?}, oracle {:?}, engine {:?})",
            first.seed,
            first.check,
            first.index.as_deref().unwrap_or("-"),
            first.planted,
            first.oracle,
            first.engine
        ));
    }
    let total = found.len();
    found.truncate(20);
    body.details = Some(json!({
        "seeds": args.seeds,
        "first_seed": args.first_seed,
        "length": args.len,
        "backend": backend,
        "indices_compared": compared,
        "disagreement_count": total,
        "disagreements": found,
    }));
    Ok(body)
}

fn keys(ks: &[Key]) -> Vec<String> {
    ks.iter().map(|k| k.to_string()).collect()
}
