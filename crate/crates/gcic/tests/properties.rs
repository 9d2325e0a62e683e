use gcic::convert::TriState;
use gcic::corpus::{Enumerator, Typed};
use gcic::precision::{struct_precision, syn_precision_gcic, DoubleContext};
use gcic::print::show;
use gcic::program::Program;
use gcic::reduce::{whnf, Fuel};
use gcic::syntax::Context;
use gcic::typing::{check_closed, Typer};
use gcic::{Env, Term, Variant, VARIANTS};
use proptest::prelude::*;
use std::sync::OnceLock;

const FUEL: u64 = 10_000;

fn corpus(v: Variant) -> &'static (Env, Vec<Typed>) {
    static CORPORA: OnceLock<Vec<(Env, Vec<Typed>)>> = OnceLock::new();
    let all = CORPORA.get_or_init(|| {
        VARIANTS
            .into_iter()
            .map(|v| {
                let env = Program::prelude().env(v);
                let terms = Enumerator::new(&env, 1_000).closed(6);
                (env, terms)
            })
            .collect()
    });
    &all[VARIANTS.iter().position(|w| *w == v).unwrap()]
}

fn variant() -> impl Strategy<Value = Variant> {
    prop::sample::select(VARIANTS.to_vec())
}

fn typed() -> impl Strategy<Value = (Variant, usize)> {
    (variant(), any::<prop::sample::Index>()).prop_map(|(v, i)| (v, i.index(corpus(v).1.len())))
}

/// Raw terms, not necessarily well typed, with free variables below `depth + 3`.
fn raw(depth: usize) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        (0..depth + 3).prop_map(Term::var),
        (0u32..3).prop_map(Term::univ),
        Just(Term::nat()),
        Just(Term::zero()),
        Just(Term::boolean(true)),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::pi("x", a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::lam("x", a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::app(a, b)),
            inner.clone().prop_map(Term::unknown),
            inner.clone().prop_map(Term::err),
            inner.clone().prop_map(Term::succ),
            (inner.clone(), inner.clone(), inner).prop_map(|(a, b, t)| Term::cast(a, b, t)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn lifting_by_zero_is_identity(t in raw(0), k in 0usize..4) {
        prop_assert_eq!(t.lift(0, k), t);
    }

    #[test]
    fn substitution_cancels_lifting(t in raw(0), u in raw(0)) {
        prop_assert_eq!(t.lift(1, 0).subst1(&u), t);
    }

    #[test]
    fn lifts_compose(t in raw(0), a in 0usize..3, b in 0usize..3) {
        prop_assert_eq!(t.lift(a, 0).lift(b, 0), t.lift(a + b, 0));
    }

    #[test]
    fn substituting_all_free_variables_closes(t in raw(0)) {
        prop_assert!(t.well_scoped(3));
        prop_assert!(t.subst(0, &[Term::zero(), Term::zero(), Term::zero()]).is_closed());
    }

    #[test]
    fn terms_round_trip_through_json(t in raw(0)) {
        let s = serde_json::to_string(&t).unwrap();
        let back: Term = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn syntactic_precision_is_reflexive(t in raw(0)) {
        prop_assert!(syn_precision_gcic(&t, &t));
    }

    #[test]
    fn everything_is_below_unknown(t in raw(0)) {
        prop_assert!(syn_precision_gcic(&t, &Term::SurfaceUnknown(0)));
    }

    #[test]
    fn printed_terms_parse_back((v, i) in typed()) {
        let (env, terms) = corpus(v);
        let t = &terms[i].term;
        let s = show(t, Some(&env.registry));
        let back = Program::prelude().term(&s).map_err(|e| TestCaseError::fail(format!("{s}: {e}")))?;
        prop_assert_eq!(&back, t, "{}", s);
    }

    #[test]
    fn types_of_terms_are_types((v, i) in typed()) {
        let (env, terms) = corpus(v);
        let mut typer = Typer::new(env, FUEL);
        prop_assert!(typer.sort(&mut Context::new(), &terms[i].ty).is_ok());
    }

    #[test]
    fn weakening((v, i) in typed(), extra in prop::sample::select(vec![Term::nat(), Term::bool(), Term::univ(0)])) {
        let (env, terms) = corpus(v);
        let t = &terms[i];
        let mut ctx = Context::new();
        ctx.push(gcic::Hint::new("w"), extra);
        let mut typer = Typer::new(env, FUEL);
        prop_assert!(typer.check(&mut ctx, &t.term.lift(1, 0), &t.ty.lift(1, 0)).is_ok());
    }

    #[test]
    fn substitution_preserves_types((v, i) in typed(), j in any::<prop::sample::Index>()) {
        let (env, terms) = corpus(v);
        let Term::Lam(_, dom, body) = &terms[i].term else { return Ok(()) };
        let Term::Pi(_, _, cod) = &terms[i].ty else { return Ok(()) };
        let args: Vec<&Typed> = terms.iter().filter(|a| a.ty == **dom).collect();
        if args.is_empty() {
            return Ok(());
        }
        let a = &args[j.index(args.len())].term;
        prop_assert!(check_closed(env, &body.subst1(a), &cod.subst1(a)).is_ok());
    }

    #[test]
    fn structural_precision_is_reflexive((v, i) in typed()) {
        let (env, terms) = corpus(v);
        let t = &terms[i].term;
        prop_assert_eq!(struct_precision(env, &DoubleContext::new(), t, t, FUEL), TriState::Yes);
    }

    #[test]
    fn reduction_is_deterministic((v, i) in typed()) {
        let (env, terms) = corpus(v);
        let t = &terms[i].term;
        let a = whnf(env, t, &mut Fuel::new(FUEL));
        let b = whnf(env, t, &mut Fuel::new(FUEL));
        prop_assert_eq!(a.term(), b.term());
    }
}
