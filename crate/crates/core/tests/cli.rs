use std::fs;
use std::path::PathBuf;
use std::process::Command;

use decor::cli::{parse_structured, run, Outcome};

fn theory(file: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "theories", file].iter().collect();
    p.display().to_string()
}

fn decor(args: &[&str]) -> Outcome {
    run(std::iter::once("decor").chain(args.iter().copied()))
}

fn field(out: &Outcome, key: &str) -> Vec<String> {
    parse_structured(&out.stdout).into_iter().filter(|(k, _)| k == key).map(|(_, v)| v).collect()
}

#[test]
fn derived_rule_files_check() {
    for f in [
        "lkp_observes_unit.drv",
        "upd_respects_weak.drv",
        "upd_lkp_id.drv",
        "weak_lkp_upd_elim.drv",
        "pure_point_factor.drv",
        "lkp_cancel_pure.drv",
        "lkp_useless.drv",
        "weak_to_strong_accessors.drv",
        "strong_to_weak_modifiers.drv",
        "upcast_chain.drv",
    ] {
        let out = decor(&["check", &theory("state.sig"), &theory(f)]);
        assert_eq!(out.code, 0, "{f}: {}{}", out.stdout, out.stderr);
    }
    let out = decor(&["check", &theory("exc.sig"), &theory("weak_to_strong_propagators.drv")]);
    assert_eq!(out.code, 0, "{}", out.stderr);
}

#[test]
fn weak_replacement_by_a_modifier_is_rejected_at_its_step() {
    let out = decor(&["--format", "structured", "check", &theory("state.sig"), &theory("bad_weak_repl.drv")]);
    assert_eq!(out.code, 1);
    assert_eq!(field(&out, "verdict"), ["rejected"]);
    assert_eq!(field(&out, "failed-step"), ["2"]);
    assert_eq!(field(&out, "rule"), ["repl"]);
}

#[test]
fn empty_derivation_is_vacuous() {
    let out = decor(&["check", &theory("state.sig"), &theory("empty.drv")]);
    assert_eq!(out.code, 0, "{}", out.stderr);
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.drv");
    fs::write(&bad, "theory L_st;\n1: refl { f = lkp[X] |- ;\n").unwrap();
    let out = decor(&["check", &theory("state.sig"), bad.to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("syntax error"), "{}", out.stderr);
    let out = decor(&["decide", &theory("one_location.sig"), "upd[X] . == id(1)"]);
    assert_eq!(out.code, 2);
    let out = decor(&["decide", "/nonexistent.sig", "upd[X] == upd[X]"]);
    assert_eq!(out.code, 2);
}

#[test]
fn decided_certificates_check() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.drv");
    let sig = theory("one_location.sig");
    let out = decor(&["decide", &sig, "upd[X] . lkp[X] == id(1)", "--emit-cert", cert.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}{}", out.stdout, out.stderr);
    let out = decor(&["--format", "structured", "check", &sig, cert.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert_eq!(field(&out, "conclusion"), ["upd[X] . lkp[X] == id(1)"]);
}

#[test]
fn strong_lookup_update_has_a_countermodel() {
    let out = decor(&["--format", "structured", "decide", &theory("one_location.sig"), "lkp[X] . upd[X] == id(V)"]);
    assert_eq!(out.code, 1);
    assert_eq!(field(&out, "verdict"), ["not-equivalent"]);
    assert!(field(&out, "countermodel").iter().any(|l| l.starts_with("carrier V = {v0, v1}")), "{}", out.stdout);
    let out = decor(&["decide", &theory("one_location.sig"), "lkp[X] . upd[X] ~~ id(V)"]);
    assert_eq!(out.code, 0);
}

#[test]
fn two_locations_are_a_fragment_violation() {
    let out = decor(&["decide", &theory("state_axioms.sig"), "upd[X] == upd[X]"]);
    assert_eq!(out.code, 4, "{}", out.stderr);
    let out = decor(&["decide", &theory("one_location.sig"), "upd[X] == upd[X]", "--theory", "com"]);
    assert_eq!(out.code, 4);
}

#[test]
fn unknown_needs_undecided_pure_equations() {
    let dir = tempfile::tempdir().unwrap();
    let sig = dir.path().join("ax.sig");
    fs::write(&sig, "location X : V; pure s : V -> V; axiom inv : s . s . s == s;\n").unwrap();
    let sig = sig.to_str().unwrap();
    let out = decor(&["decide", sig, "s . s . lkp[X] == lkp[X]"]);
    assert_eq!(out.code, 3, "{}", out.stdout);
    let out = decor(&["decide", sig, "s . s . lkp[X] == lkp[X]", "--oracle", "semantic"]);
    assert_eq!(out.code, 1, "{}", out.stdout);
}

#[test]
fn normalize_reports_the_canonical_update() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("nf.drv");
    let sig = theory("one_location.sig");
    let long = decor(&["--format", "structured", "normalize", &sig, "upd[X] . lkp[X] . upd[X]", "--emit-cert", cert.to_str().unwrap()]);
    let short = decor(&["--format", "structured", "normalize", &sig, "upd[X]"]);
    assert_eq!(long.code, 0);
    assert_eq!(field(&long, "canonical"), field(&short, "canonical"));
    assert_eq!(field(&long, "lookups"), ["1"]);
    assert_eq!(field(&long, "updates"), ["1"]);
    assert_eq!(decor(&["check", &sig, cert.to_str().unwrap()]).code, 0);
}

#[test]
fn reduce_lists_pure_equations() {
    let sig = theory("one_location.sig");
    let out = decor(&["--format", "structured", "reduce", &sig, "upd[X] . lkp[X] == id(1)"]);
    assert_eq!(out.code, 0);
    assert_eq!(field(&out, "count"), ["0"]);
    let out = decor(&["--format", "structured", "reduce", &sig, "upd[X] == final(V)"]);
    assert_eq!(field(&out, "count"), ["1"]);
    assert_eq!(field(&out, "pure"), ["c . final(V) == id(V)"]);
}

#[test]
fn eval_on_a_two_element_model() {
    let out = decor(&["--format", "structured", "eval", &theory("one_location.sig"), "lkp[X]", "--model", &theory("m2.mdl")]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(field(&out, "rows"), ["2"]);
    assert_eq!(field(&out, "table").len(), 2);
}

#[test]
fn dualize_maps_the_axiom_files() {
    let dir = tempfile::tempdir().unwrap();
    let map = "X=T,Y=R,c=e,s=r";
    for (src, want) in [("state_axioms.sig", "exc_axioms.sig"), ("one_location.sig", "one_exception.sig")] {
        let out_path = dir.path().join(want);
        let m = if src == "state_axioms.sig" { map } else { "" };
        let out = decor(&["dualize", &theory(src), "--map", m, "--output", out_path.to_str().unwrap()]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        assert_eq!(fs::read_to_string(&out_path).unwrap(), fs::read_to_string(theory(want)).unwrap(), "{src}");
    }
    let out_path = dir.path().join("exc_axioms.drv");
    let out = decor(&[
        "dualize",
        &theory("state_axioms.drv"),
        "--sig",
        &theory("state_axioms.sig"),
        "--map",
        map,
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(fs::read_to_string(&out_path).unwrap(), fs::read_to_string(theory("exc_axioms.drv")).unwrap());
    assert_eq!(decor(&["check", &theory("exc_axioms.sig"), out_path.to_str().unwrap()]).code, 0);
}

#[test]
fn exceptions_are_decided_through_the_dual() {
    let sig = theory("one_exception.sig");
    assert_eq!(decor(&["decide", &sig, "untag[X] . tag[X] ~~ id(V)", "--theory", "exc"]).code, 0);
    assert_eq!(decor(&["decide", &sig, "untag[X] . tag[X] == id(V)", "--theory", "exc"]).code, 1);
}

#[test]
fn formats_carry_the_same_fields() {
    let args = ["decide", &theory("one_location.sig"), "upd[X] == final(V)"].map(String::from);
    let text = run(["decor", "--format", "text"].iter().map(|s| s.to_string()).chain(args.iter().cloned()));
    let structured = run(["decor", "--format", "structured"].iter().map(|s| s.to_string()).chain(args.iter().cloned()));
    assert_eq!(text.code, structured.code);
    assert!(text.stdout.starts_with("not-equivalent: decide "));
    let keys: Vec<String> = parse_structured(&structured.stdout).into_iter().map(|(k, _)| k).collect();
    for k in ["command", "verdict", "failed", "countermodel", "input", "lhs", "rhs", "time-ms"] {
        assert!(keys.iter().any(|x| x == k), "{k} missing: {}", structured.stdout);
    }
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_decor");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["check", &theory("state.sig"), &theory("upd_lkp_id.drv")]), Some(0));
    assert_eq!(status(&["decide", &theory("one_location.sig"), "lkp[X] . upd[X] == id(V)"]), Some(1));
    assert_eq!(status(&["decide", &theory("state_axioms.sig"), "upd[X] == upd[X]"]), Some(4));
    assert_eq!(status(&["nonsense"]), Some(2));
}
