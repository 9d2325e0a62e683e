use gcic::program::Program;
use gcic::Term;
use serde_json::Value;
use std::process::{Command, Output};

fn examples(name: &str) -> String {
    format!("{}/../gcic/examples/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn gcic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcic")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn omega_exit_codes() {
    let omega = examples("omega1.gcic");
    let o = gcic(&["eval", &omega, "--variant", "norm"]);
    assert_eq!(code(&o), 2);
    assert_eq!(stdout(&o), "err[?[Type]] : ?[Type]\n");
    let o = gcic(&["eval", &omega, "--variant", "grad", "--fuel", "1000"]);
    assert_eq!(code(&o), 3);
    let o = gcic(&["eval", &examples("omega0.gcic"), "--variant", "shift"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn static_files_under_shift() {
    let dir = examples("static");
    let mut files: Vec<String> =
        std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path().display().to_string()).collect();
    files.sort();
    let printf: Vec<&String> = files.iter().filter(|f| f.ends_with("printf.gcic")).collect();
    let others: Vec<&str> = files.iter().filter(|f| !f.ends_with("printf.gcic")).map(|s| s.as_str()).collect();
    let mut args = vec!["check", "--variant", "shift"];
    args.extend(&others);
    assert_eq!(code(&gcic(&args)), 0);
    assert_eq!(code(&gcic(&["check", "--variant", "shift", printf[0]])), 1);
    assert_eq!(code(&gcic(&["check", "--variant", "grad", printf[0]])), 0);
}

#[test]
fn json_results_deserialize_to_terms() {
    let o = gcic(&["eval", &examples("vectors.gcic"), "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let items = v.as_array().unwrap();
    assert_eq!(items.len(), 4);
    let p = Program::load(&std::fs::read_to_string(examples("vectors.gcic")).unwrap()).unwrap();
    let expected = ["nil nat", "err[vec nat 1]", "err[nat]", "0"];
    for (item, want) in items.iter().zip(expected) {
        let got: Term = serde_json::from_value(item["result"]["term"].clone()).unwrap();
        assert_eq!(got, p.term(want).unwrap());
        let shown = item["result"]["shown"].as_str().unwrap();
        assert_eq!(p.term(shown).unwrap(), got);
    }
    assert_eq!(items[1]["status"], "err");
    assert_eq!(code(&o), 2);
}

#[test]
fn output_is_deterministic() {
    let args = ["eval", &examples("fording.gcic"), "--trace", "--json"];
    let a = gcic(&args);
    let b = gcic(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn precision_with_blame() {
    let dir = std::env::temp_dir().join(format!("gcic-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (l, r) = (dir.join("l.gcic"), dir.join("r.gcic"));
    std::fs::write(&l, "eval fun (x : nat) => x").unwrap();
    std::fs::write(&r, "eval fun (x : ?@1) => x").unwrap();
    let (l, r) = (l.display().to_string(), r.display().to_string());
    let o = gcic(&["prec", &l, &r]);
    assert_eq!(stdout(&o), "term: Yes\ntype: Yes\n");
    let o = gcic(&["prec", &r, &l]);
    let out = stdout(&o);
    assert!(out.starts_with("term: No\n  blame "), "{out}");
    assert_eq!(code(&o), 0);
}

#[test]
fn oracle_agrees_on_arithmetic() {
    let o = gcic(&["oracle", &examples("static/arith.gcic"), "--variant", "norm"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().all(|l| l.contains(": agree")));
}

#[test]
fn usage_errors() {
    assert_eq!(code(&gcic(&["frobnicate"])), 4);
    assert_eq!(code(&gcic(&["eval"])), 4);
    assert_eq!(code(&gcic(&["eval", "/nonexistent.gcic"])), 4);
    assert_eq!(code(&gcic(&["eval", &examples("vectors.gcic"), "--variant", "other"])), 4);
    assert_eq!(code(&gcic(&["--help"])), 0);
}

#[test]
fn small_suite_passes() {
    let o = gcic(&["suite", "--size", "4", "--generated", "100", "--variant", "shift"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}
