use gcic_web::{elaborate, evaluate, precision};

const OMEGA: &str = include_str!("../../gcic/examples/omega1.gcic");

#[test]
fn evaluates_per_variant() {
    assert_eq!(evaluate(OMEGA, "norm", 10_000), "err[?[Type]] : ?[Type]");
    assert_eq!(evaluate(OMEGA, "grad", 1_000), "out of fuel after 1000 steps");
    assert_eq!(evaluate("eval S (S 0)", "shift", 1_000), "2 : nat");
}

#[test]
fn elaborates_with_casts() {
    let out = elaborate("def id (x : ?@1) : ?@1 := x\neval id 0", "grad", 1_000);
    assert!(out.contains("<= nat> 0"), "{out}");
    assert!(out.ends_with(": <Type <= ?[Type@1]> ?[?[Type@1]]"), "{out}");
}

#[test]
fn compares_precision() {
    let l = "eval fun (x : nat) => x";
    let r = "eval fun (x : ?@1) => x";
    assert_eq!(precision(l, r, "grad", 1_000), "term: Yes\ntype: Yes");
    assert!(precision(r, l, "grad", 1_000).starts_with("term: No\n  blame"));
}

#[test]
fn reports_errors() {
    assert!(evaluate("eval (", "grad", 10).starts_with("error: "));
    assert!(evaluate("eval 0", "other", 10).starts_with("error: "));
}
