use gcic::convert::TriState;
use gcic::precision::*;
use gcic::program::Program;
use gcic::reduce::{reducts, step_full};
use gcic::syntax::Term;
use gcic::{Env, Variant, VARIANTS};

const FUEL: u64 = 10_000;

fn term(src: &str) -> Term {
    Program::prelude().term(src).unwrap()
}

fn env(v: Variant) -> Env {
    Program::prelude().env(v)
}

fn alpha(v: Variant, t: &str, u: &str) -> TriState {
    struct_precision(&env(v), &DoubleContext::new(), &term(t), &term(u), FUEL)
}

/// `<nat -> nat <= ?[Type@i]> <?[Type@i] <= nat -> nat> fun x => S x`.
fn round_trip(i: u32) -> String {
    format!("<nat -> nat <= ?[Type@{i}]> <?[Type@{i}] <= nat -> nat> (fun (x : nat) => S x)")
}

#[test]
fn syntactic_precision_examples() {
    assert!(syn_precision_gcic(&term("fun (x : nat) => x"), &term("?@3")));
    assert!(syn_precision_gcic(&term("fun (x : nat) => x"), &term("fun (x : ?) => x")));
    assert!(!syn_precision_gcic(&term("0"), &term("1")));
    assert!(!syn_precision_gcic(&term("?"), &term("0")));
}

#[test]
fn structural_precision_examples() {
    for v in VARIANTS {
        assert_eq!(alpha(v, "err[nat]", "S 0"), TriState::Yes);
        assert_eq!(alpha(v, "err[nat]", "?[nat]"), TriState::Yes);
        assert_eq!(alpha(v, "0", "<nat <= nat> 0"), TriState::Yes);
        assert_eq!(alpha(v, "0", "<bool <= nat> 0"), TriState::No);
        assert_eq!(alpha(v, "0", "1"), TriState::No);
        assert_eq!(alpha(v, "true", "?[bool]"), TriState::Yes);
        assert_eq!(alpha(v, "fun (x : nat) => err[nat]", "fun (y : nat) => y"), TriState::Yes);
        assert_eq!(alpha(v, "<nat <= nat> 0", "0"), TriState::Yes);
    }
}

#[test]
fn unknown_universe_allows_lower_levels() {
    for v in VARIANTS {
        assert_eq!(alpha(v, "nat", "?[Type@2]"), TriState::Yes);
        assert_eq!(alpha(v, "Type", "?[Type@1]"), TriState::Yes);
        assert_eq!(alpha(v, "Type@1", "?[Type@1]"), TriState::No);
        assert_eq!(alpha(v, "Type", "?[Type@2]"), TriState::Yes);
    }
}

#[test]
fn definitional_precision_examples() {
    for v in VARIANTS {
        let e = env(v);
        let dc = DoubleContext::new();
        let d = |t: &str, u: &str| def_precision(&e, &dc, &term(t), &term(u), FUEL);
        assert_eq!(d("(fun (X : Type) => X) nat", "nat"), TriState::Yes);
        assert_eq!(d("nat", "(fun (X : Type) => X) nat"), TriState::Yes);
        assert_eq!(d("nat", "?[Type]"), TriState::Yes);
        assert_eq!(d("bool", "nat"), TriState::No);
    }
}

#[test]
fn static_terms_are_only_related_to_themselves() {
    let e = env(Variant::Grad);
    let terms = ["0", "1", "nat", "bool", "fun (x : nat) => x", "fun (x : nat) => S x", "Type", "nat -> nat"];
    for a in terms {
        for b in terms {
            let r = struct_precision(&e, &DoubleContext::new(), &term(a), &term(b), FUEL);
            assert_eq!(r, (term(a) == term(b)).into(), "{a} vs {b}");
        }
    }
}

#[test]
fn lambda_round_trip_through_unknown() {
    let lam = "fun (x : nat) => S x";
    for v in VARIANTS {
        for i in 0..3 {
            let expected = if v == Variant::Shift && i == 0 { TriState::No } else { TriState::Yes };
            assert_eq!(alpha(v, lam, &round_trip(i)), expected, "{v} at level {i}");
        }
    }
}

#[test]
fn simulation_catches_up_through_the_round_trip() {
    for (v, i) in [(Variant::Grad, 0), (Variant::Shift, 1)] {
        let e = env(v);
        let t = term("(fun (x : nat) => S x) 0");
        let u = term(&format!("({}) 0", round_trip(i)));
        assert!(gcic::typing::infer_closed(&e, &u).is_ok());
        assert_eq!(struct_precision(&e, &DoubleContext::new(), &t, &u, FUEL), TriState::Yes);
        let (s, _) = step_full(&e, &t).unwrap();
        match simulate_step(&e, &DoubleContext::new(), &u, &s, FUEL) {
            Simulation::Simulated { steps, .. } => assert!(steps > 0),
            other => panic!("{v}: {other:?}"),
        }
    }
}

#[test]
fn simulation_fails_in_norm_at_level_zero() {
    let e = env(Variant::Norm);
    let t = term("(fun (x : nat) => S x) 0");
    let u = term(&format!("({}) 0", round_trip(0)));
    assert_eq!(struct_precision(&e, &DoubleContext::new(), &t, &u, FUEL), TriState::Yes);
    let (s, _) = step_full(&e, &t).unwrap();
    assert_eq!(simulate_step(&e, &DoubleContext::new(), &u, &s, FUEL), Simulation::Counterexample);
}

#[test]
fn error_steps_are_simulated_by_zero_steps() {
    for v in VARIANTS {
        let e = env(v);
        let t = term("err[nat -> nat] 0");
        let u = term("(fun (x : nat) => x) 0");
        assert_eq!(struct_precision(&e, &DoubleContext::new(), &t, &u, FUEL), TriState::Yes);
        for (s, _) in reducts(&e, &t) {
            match simulate_step(&e, &DoubleContext::new(), &u, &s, FUEL) {
                Simulation::Simulated { steps, .. } => assert_eq!(steps, 0),
                other => panic!("{v}: {other:?}"),
            }
        }
    }
}

#[test]
fn catch_up_of_the_round_trip() {
    let lam = term("fun (x : nat) => S x");
    for v in VARIANTS {
        for i in 0..3 {
            let e = env(v);
            assert!(gcic::typing::infer_closed(&e, &term(&round_trip(i))).is_ok());
            let holds = !(i == 0 && v != Variant::Grad);
            let r = catch_up(&e, &lam, &term(&round_trip(i)), FUEL);
            assert_eq!(matches!(r, CatchUp::Holds), holds, "{v} at {i}: {r:?}");
        }
    }
}

#[test]
fn dgg_examples() {
    for v in VARIANTS {
        let e = env(v);
        assert_eq!(dgg_observe(&e, &term("true"), &term("?[bool]"), FUEL), Refinement::Refines);
        assert_eq!(dgg_observe(&e, &term("true"), &term("true"), FUEL), Refinement::Refines);
        assert_eq!(dgg_observe(&e, &term("err[bool]"), &term("false"), FUEL), Refinement::Refines);
        assert!(matches!(dgg_observe(&e, &term("true"), &term("false"), FUEL), Refinement::Violation { .. }));
    }
    let c = apply_zero_context();
    let lam = term("fun (x : nat) => S x");
    for (v, i) in [(Variant::Grad, 0), (Variant::Norm, 0), (Variant::Norm, 1), (Variant::Shift, 1)] {
        let e = env(v);
        let cast = term(&round_trip(i));
        let r = dgg_observe(&e, &plug(&c, &lam), &plug(&c, &cast), FUEL);
        if (v, i) == (Variant::Norm, 0) {
            assert_eq!(
                r,
                Refinement::Violation { left: Observation::Value(Term::boolean(true)), right: Observation::Error }
            );
        } else {
            assert_eq!(r, Refinement::Refines);
        }
    }
}

#[test]
fn equiprecision_is_reflexive_and_symmetric() {
    let e = env(Variant::Grad);
    let dc = DoubleContext::new();
    for t in ["0", "?[nat]", "<nat <= nat> 0", "fun (x : ?[Type]) => x"] {
        assert_eq!(equiprecise(&e, &dc, &term(t), &term(t), FUEL), TriState::Yes);
    }
    let (a, b) = (term("0"), term("<nat <= nat> 0"));
    assert_eq!(equiprecise(&e, &dc, &a, &b, FUEL), equiprecise(&e, &dc, &b, &a, FUEL));
    assert_eq!(equiprecise(&e, &dc, &a, &b, FUEL), TriState::Yes);
}
