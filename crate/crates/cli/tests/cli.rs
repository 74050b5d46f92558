use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn mrs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mrs")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn temp(name: &str) -> String {
    let mut p = std::env::temp_dir();
    p.push(format!("mrs-cli-{}-{name}", std::process::id()));
    p.to_string_lossy().into_owned()
}

#[test]
fn check_verdicts_and_exit_codes() {
    let ok = mrs(&["check", &fixture("parity.mrs")]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("noetherian: verified"));

    let cyc = mrs(&["check", &fixture("loop.mrs")]);
    assert_eq!(cyc.status.code(), Some(1));
    assert!(stdout(&cyc).contains("cycle a -> b -> a"), "{}", stdout(&cyc));
}

#[test]
fn normal_form_carries_a_derivation() {
    let o = mrs(&["nf", &fixture("parity.mrs"), "7"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("normal form: 1"));
    assert!(out.contains("7 -> 5 -> 3 -> 1"));
}

#[test]
fn irreducibles_of_the_powerset_fixture() {
    let o = mrs(&["irr", &fixture("powerset.mrs")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("irreducibles: {} {b} {c} {a,c} {a,b,c}"));
}

#[test]
fn quotient_of_a_table() {
    let o = mrs(&["quotient", &fixture("z2.mrs")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("classes: 2"));
}

#[test]
fn present_prints_a_readable_system() {
    let o = mrs(&["present", &fixture("z2.mrs")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("11 -> _"));
    let path = temp("g.mrs");
    std::fs::write(&path, &text).unwrap();
    let again = mrs(&["check", &path]);
    assert_eq!(again.status.code(), Some(0), "{}", stdout(&again));
    std::fs::remove_file(path).ok();
}

#[test]
fn counit_multiplies_letters() {
    let o = mrs(&["counit", &fixture("parity.mrs"), "1111"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("image: 4"));
}

#[test]
fn adjoint_check_on_parity() {
    let o = mrs(&["adjoint-check", &fixture("z2.mrs"), &fixture("parity.mrs")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("presentation triangle: true"));
    assert!(stdout(&o).contains("counit naturality: true"));

    let along = mrs(&[
        "adjoint-check",
        &fixture("z2.mrs"),
        &fixture("parity.mrs"),
        "--to",
        &fixture("z2.mrs"),
        "--map",
        &fixture("parity_to_z2.hom"),
    ]);
    assert_eq!(along.status.code(), Some(0), "{}", stdout(&along));
    assert!(stdout(&along).contains("counit naturality: true"));
}

#[test]
fn tietze_then_validate_and_apply() {
    let script = temp("path.gett");
    let o = mrs(&["tietze", &fixture("nat_shift.mrs"), &fixture("singleton.mrs"), "-o", &script]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("matches target: true"));

    let v = mrs(&["gett", "validate", &fixture("nat_shift.mrs"), &script]);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));

    let a = mrs(&["gett", "apply", &fixture("nat_shift.mrs"), &script]);
    assert_eq!(a.status.code(), Some(0));
    assert!(stdout(&a).starts_with("monoid table"));
    std::fs::remove_file(script).ok();
}

#[test]
fn tietze_reports_the_failing_stage() {
    let o = mrs(&["tietze", &fixture("parity.mrs"), &fixture("z2.mrs")]);
    assert_eq!(o.status.code(), Some(1));
    let report = stderr(&o);
    assert!(report.contains("failed: stage 2"), "{report}");
    assert!(stdout(&o).contains("# rejected"));
}

#[test]
fn validate_rejects_a_bad_certificate() {
    let o = mrs(&["gett", "validate", &fixture("z2.mrs"), &fixture("bad.gett")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("failed at move: 0"));
}

#[test]
fn generators() {
    let c = mrs(&["gen", "closure-rules", &fixture("sierpinski.top")]);
    assert_eq!(c.status.code(), Some(0));
    assert!(stdout(&c).contains("{a} -> {a,b}"));
    let h = mrs(&["gen", "horn-rules", &fixture("chain.horn")]);
    assert_eq!(h.status.code(), Some(0));
    assert!(stdout(&h).contains("{q} -> {q,r}"));
}

#[test]
fn hom_check() {
    let ok = mrs(&["hom", "check", &fixture("parity.mrs"), &fixture("z2.mrs"), &fixture("parity_to_z2.hom")]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = mrs(&["hom", "check", &fixture("nat_shift.mrs"), &fixture("z2.mrs"), &fixture("parity_to_z2.hom")]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn json_output() {
    let o = mrs(&["--json", "check", &fixture("parity.mrs")]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).expect("valid json");
    assert_eq!(v["status"], "verified");
    assert_eq!(v["command"], "check");
}

#[test]
fn usage_and_parse_errors_exit_3() {
    assert_eq!(mrs(&["nope"]).status.code(), Some(3));
    let broken = mrs(&["check", &fixture("broken.mrs")]);
    assert_eq!(broken.status.code(), Some(3));
    assert!(stderr(&broken).contains("missing entry 1*1"));
    assert_eq!(mrs(&["nf", &fixture("parity.mrs"), "x"]).status.code(), Some(3));
}

#[test]
fn small_bound_gives_unknown() {
    let o = mrs(&["--bound", "2", "irr", &fixture("powerset.mrs")]);
    assert!(matches!(o.status.code(), Some(0) | Some(2)));
}

#[test]
fn handwritten_script() {
    let o = mrs(&["gett", "apply", &fixture("parity.mrs"), &fixture("parity.gett")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("v -> 1"));
}
