use gcic::program::{run, Program};
use gcic::reduce::Outcome;
use gcic::syntax::Term;
use gcic::{Variant, VARIANTS};

fn load(name: &str) -> Program {
    let src = std::fs::read_to_string(format!("{}/examples/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap();
    Program::load(&src).unwrap()
}

#[test]
fn omega_level_zero_elaborates_only_in_grad() {
    let p = load("omega0.gcic");
    for v in VARIANTS {
        let r = run(&p.env(v), p.main().unwrap(), 1000);
        assert_eq!(r.is_ok(), v == Variant::Grad, "{v}: {:?}", r.err());
    }
}

#[test]
fn omega_level_one_diverges_or_fails() {
    let p = load("omega1.gcic");
    for v in VARIANTS {
        let r = run(&p.env(v), p.main().unwrap(), 1000).unwrap();
        match v {
            Variant::Grad => assert!(r.outcome.is_exhausted()),
            _ => {
                assert_eq!(r.outcome.term(), &Term::err(Term::unk_univ(0)), "{v}");
                assert!(matches!(r.outcome, Outcome::Value(..)));
                assert!(r.steps <= 200, "{v}: {} steps", r.steps);
            }
        }
    }
}
