use std::path::{Path, PathBuf};
use std::process::Command;

use prokit_cli::doc::{canonical, parse, MorphismDocument, SystemDocument};
use prokit_cli::report::{without_timing, Report};
use prokit_cli::{run, Outcome};
use prokit_core::system::{check_strict, min_commutation_index};
use prokit_core::{Key, Status};

fn corpus(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/corpus")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn prokit(args: &[&str]) -> Outcome {
    prokit_env(args, None)
}

fn prokit_env(args: &[&str], env: Option<&str>) -> Outcome {
    let mut all = vec!["prokit"];
    all.extend_from_slice(args);
    run(all, env)
}

fn report(out: &Outcome) -> Report {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("bad report {e}: {}", out.stdout))
}

fn verdict_status(r: &Report, name: &str) -> Status {
    r.verdicts.iter().find(|v| v.name == name).unwrap().verdict.status
}

#[test]
fn strict_document_checks_clean() {
    for file in ["chain_strict.json", "nat_strict.json", "chain_matmod.json", "diamond.json"] {
        let out = prokit(&["check", &corpus(file), "--mode", "strict"]);
        assert_eq!(out.code, 0, "{file}: {}", out.stderr);
        let r = report(&out);
        assert!(r.verdicts.iter().all(|v| v.verdict.status == Status::Holds));
    }
}

#[test]
fn planted_document_fails_strict_with_a_triple() {
    let out = prokit(&["check", &corpus("nat_planted.json"), "--mode", "strict"]);
    assert_eq!(out.code, 1);
    let r = report(&out);
    let ce = r.verdicts[1].verdict.counterexample.clone().unwrap();
    assert_eq!(ce.elements.len(), 3);
    assert_eq!(ce.elements[0], Key::Nat(1));
}

#[test]
fn planted_delay_beyond_the_window_is_inconclusive() {
    let out = prokit(&["check", &corpus("nat_planted.json"), "--mode", "delay", "--horizon", "4"]);
    assert_eq!(out.code, 2);
    assert_eq!(report(&out).outcome, "inconclusive");
    let out = prokit(&["check", &corpus("nat_planted.json"), "--mode", "delay"]);
    assert_eq!(out.code, 0);
}

#[test]
fn adversarial_sequence_never_refutes() {
    let out = prokit(&["check", &corpus("nat_adversarial.json"), "--horizon", "40"]);
    assert_eq!(out.code, 2);
}

#[test]
fn delay_witnesses_replay_through_the_library() {
    let out = prokit(&["check", &corpus("nat_planted.json")]);
    let r = report(&out);
    let doc: SystemDocument = parse(&std::fs::read_to_string(corpus("nat_planted.json")).unwrap()).unwrap();
    let s = doc.build().unwrap();
    let h = r.horizon.unwrap();
    let delay = &r.verdicts[1].verdict;
    assert!(!delay.witnesses.is_empty());
    for w in &delay.witnesses {
        let v = min_commutation_index(&s, &w.at[0], h).unwrap();
        assert_eq!(v.witnesses[0].chosen, w.chosen);
    }
}

#[test]
fn horizon_precedence() {
    let planted = corpus("nat_planted.json");
    let strict = corpus("nat_strict.json");
    let h = |out: Outcome| report(&out).horizon.unwrap();
    assert_eq!(h(prokit_env(&["check", &planted, "--horizon", "9"], Some("7"))), 9);
    assert_eq!(h(prokit_env(&["check", &planted], Some("7"))), 20);
    assert_eq!(h(prokit_env(&["check", &strict], Some("7"))), 7);
    assert_eq!(h(prokit(&["check", &strict])), 32);
    assert_eq!(prokit_env(&["check", &strict], Some("lots")).code, 64);
}

#[test]
fn mardesic_on_a_three_chain() {
    let out = prokit(&["reduce", &corpus("chain_strict.json"), "--op", "mardesic"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let r = report(&out);
    assert_eq!(r.details.as_ref().unwrap()["elements_in_window"], 7);
    let doc = r.output.unwrap();
    let s = doc.build().unwrap();
    assert_eq!(s.index().window_keys(100).len(), 7);
    assert!(check_strict(&s, 100).unwrap().holds_exactly());
}

#[test]
fn extract_on_step_two_profile() {
    let out = prokit(&["reduce", &corpus("nat_shift2.json"), "--op", "extract", "--start", "1"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let r = report(&out);
    let chain: Vec<String> = serde_json::from_value(r.details.unwrap()["chain"].clone()).unwrap();
    assert_eq!(&chain[..7], ["1", "4", "7", "10", "13", "16", "19"]);
    // the emitted document is the finite strict subsystem
    let s = r.output.unwrap().build().unwrap();
    assert!(check_strict(&s, 100).unwrap().holds_exactly());
}

#[test]
fn restrict_to_evens_keeps_an_iso_pair() {
    let out = prokit(&["reduce", &corpus("nat_strict.json"), "--op", "restrict", "--subset", "evens"]);
    assert_eq!(out.code, 0);
    assert_eq!(verdict_status(&report(&out), "iso_pair"), Status::Holds);
    assert_eq!(prokit(&["reduce", &corpus("nat_strict.json"), "--op", "restrict"]).code, 64);
}

#[test]
fn emit_writes_the_reduced_document() {
    let dir = std::env::temp_dir().join(format!("prokit-emit-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("seq.json");
    let p = path.to_string_lossy().into_owned();
    let out = prokit(&["reduce", &corpus("diamond.json"), "--op", "sequence", "--emit", &p]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let text = std::fs::read_to_string(&path).unwrap();
    let doc: SystemDocument = parse(&text).unwrap();
    assert_eq!(canonical(&doc), text);
    assert_eq!(Some(doc), report(&out).output);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn morphism_commands() {
    assert_eq!(prokit(&["morphism", &corpus("morphism_identity.json")]).code, 0);
    assert_eq!(prokit(&["morphism", &corpus("morphism_shift.json"), "--op", "special"]).code, 0);
    assert_eq!(prokit(&["morphism", &corpus("morphism_swap.json"), "--op", "iso"]).code, 0);
    assert_eq!(prokit(&["morphism", &corpus("morphism_collapse.json"), "--op", "iso"]).code, 1);

    let out = prokit(&["morphism", &corpus("morphism_planted_iso.json"), "--op", "extract-iso"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let r = report(&out);
    for name in ["source_strict", "target_strict", "squares", "iso_pair"] {
        assert_eq!(verdict_status(&r, name), Status::Holds, "{name}");
    }
    let chain: Vec<String> = serde_json::from_value(r.details.unwrap()["chain"].clone()).unwrap();
    assert_eq!(chain[0], "4");

    let out = prokit(&["morphism", &corpus("morphism_planted_iso.json"), "--op", "level"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
}

#[test]
fn mismatched_systems_are_a_boundary_error() {
    let out = prokit(&["morphism", &corpus("morphism_mismatch.json")]);
    assert_eq!(out.code, 64);
    assert!(out.stderr.contains("boundary"));
    assert_eq!(report(&out).error.unwrap().kind, "boundary");
}

#[test]
fn fuzz_contract() {
    let out = prokit(&["fuzz", "--seeds", "20"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(report(&out).details.unwrap()["disagreement_count"], 0);
    let out = prokit(&["fuzz", "--seeds", "10", "--backend", "matmod"]);
    assert_eq!(out.code, 0, "{}", out.stderr);

    let out = prokit(&["fuzz", "--seeds", "5", "--first-seed", "11", "--inject-fault"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("seed 11"), "{}", out.stderr);

    assert_eq!(prokit(&["fuzz", "--seeds", "0"]).code, 64);
}

#[test]
fn usage_and_parse_errors() {
    assert_eq!(prokit(&["frobnicate"]).code, 64);
    assert_eq!(prokit(&["check"]).code, 64);
    assert_eq!(prokit(&["check", "/nonexistent/doc.json"]).code, 64);
    assert_eq!(prokit(&["--help"]).code, 0);

    let dir = std::env::temp_dir().join(format!("prokit-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\n  \"category\": {\"backend\": \"finset\"},\n  \"index\": oops\n}\n").unwrap();
    let out = prokit(&["check", &bad.to_string_lossy()]);
    assert_eq!(out.code, 64);
    assert!(out.stderr.contains("line 3"), "{}", out.stderr);

    std::fs::write(
        &bad,
        r#"{"category":{"backend":"finset"},"index":{"kind":"nat"},"bonds":{"kind":"generated","generator":"nope"}}"#,
    )
    .unwrap();
    let out = prokit(&["check", &bad.to_string_lossy()]);
    assert_eq!(out.code, 64);
    assert!(out.stderr.contains("unknown generator"));
    std::fs::remove_dir_all(dir).ok();
}

fn corpus_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files
}

#[test]
fn corpus_is_canonical() {
    for f in corpus_files() {
        let text = std::fs::read_to_string(&f).unwrap();
        let again = if let Ok(d) = parse::<SystemDocument>(&text) {
            assert_eq!(parse::<SystemDocument>(&canonical(&d)).unwrap(), d);
            canonical(&d)
        } else {
            let d: MorphismDocument = parse(&text).unwrap();
            assert_eq!(parse::<MorphismDocument>(&canonical(&d)).unwrap(), d);
            canonical(&d)
        };
        assert_eq!(again, text, "{}", f.display());
        assert_eq!(prokit(&["fmt", "--check", &f.to_string_lossy()]).code, 0);
    }
}

#[test]
fn reports_are_deterministic() {
    let runs: [&[&str]; 3] = [
        &["check", &corpus("nat_planted.json")],
        &["reduce", &corpus("nat_shift2.json"), "--op", "extract"],
        &["fuzz", "--seeds", "8"],
    ];
    for args in runs {
        let (a, b) = (prokit(args), prokit(args));
        assert_eq!(without_timing(report(&a)), without_timing(report(&b)));
    }
}

#[test]
fn binary_exit_codes_and_environment() {
    let bin = env!("CARGO_BIN_EXE_prokit");
    let status = |args: &[&str], env: Option<&str>| {
        let mut c = Command::new(bin);
        c.args(args).env_remove("PROKIT_HORIZON");
        if let Some(v) = env {
            c.env("PROKIT_HORIZON", v);
        }
        let out = c.output().unwrap();
        (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
    };
    let planted = corpus("nat_planted.json");
    assert_eq!(status(&["check", &planted, "--mode", "strict"], None).0, 1);
    assert_eq!(status(&["check", &planted, "--horizon", "4"], None).0, 2);
    assert_eq!(status(&["fuzz", "--seeds", "0"], None).0, 64);
    let (code, out) = status(&["check", &corpus("nat_strict.json")], Some("6"));
    assert_eq!(code, 0);
    let r: Report = serde_json::from_str(&out).unwrap();
    assert_eq!(r.horizon, Some(6));
}
