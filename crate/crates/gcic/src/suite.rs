//! Executable metatheory: property checks run over a corpus of closed
//! well-typed terms, shared by the acceptance test and the command line.

use crate::convert::{consistent_with, TriState};
use crate::corpus::{abstractions, elaborate, positions, replace_at, static_corpus, Enumerator, Typed};
use crate::elab::{erase, Elaborator};
use crate::env::{Env, Variant};
use crate::model::{oracle_compare, Verdict};
use crate::precision::{
    catch_up, dgg_observe, simulate_step, struct_precision, CatchUp, DoubleContext, Refinement, Simulation,
};
use crate::reduce::{classify, normalize, reducts, Class, Fuel, Outcome};
use crate::syntax::{Context, Term};
use crate::typing::{check_closed, Typer};
use rayon::prelude::*;
use std::fmt;

/// Counts for one property.
#[derive(Clone, Debug, Default)]
pub struct Tally {
    pub checked: usize,
    /// Fuel ran out before the property could be decided.
    pub inconclusive: usize,
    pub failures: Vec<String>,
}

impl Tally {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.checked += other.checked;
        self.inconclusive += other.inconclusive;
        self.failures.extend(other.failures);
        self
    }

    fn one(r: Check) -> Tally {
        match r {
            Check::Pass => Tally { checked: 1, ..Tally::default() },
            Check::Skip => Tally::default(),
            Check::Unknown => Tally { checked: 1, inconclusive: 1, failures: vec![] },
            Check::Fail(m) => Tally { checked: 1, inconclusive: 0, failures: vec![m] },
        }
    }
}

impl fmt::Display for Tally {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} checked, {} inconclusive, {} failed", self.checked, self.inconclusive, self.failures.len())
    }
}

enum Check {
    Pass,
    Skip,
    Unknown,
    Fail(String),
}

fn run_all<T: Sync>(items: &[T], f: impl Fn(&T) -> Check + Sync) -> Tally {
    items.par_iter().map(|x| Tally::one(f(x))).reduce(Tally::default, Tally::merge)
}

fn show(env: &Env, t: &Term) -> String {
    crate::print::show(t, Some(&env.registry))
}

/// The exhaustive enumeration up to `max_size` followed by `generated`
/// seeded random terms.
pub fn corpus(env: &Env, max_size: usize, generated: usize, seed: u64) -> Vec<Typed> {
    let mut base = Enumerator::new(env, 1_000).closed(max_size);
    let extra = crate::corpus::generate(env, &base, generated, seed, 24, 1_000);
    base.extend(extra);
    base
}

/// Progress: a closed well-typed term is canonical or steps.
pub fn progress(env: &Env, terms: &[Typed]) -> Tally {
    run_all(terms, |t| match classify(env, &t.term) {
        Class::Canonical | Class::Reducible => Check::Pass,
        c => Check::Fail(format!("{}: classified {c:?}", show(env, &t.term))),
    })
}

/// Subject reduction: every one-step reduct checks against the original type.
pub fn subject_reduction(env: &Env, terms: &[Typed], fuel: u64) -> Tally {
    run_all(terms, |t| {
        for (r, rule) in reducts(env, &t.term) {
            let mut typer = Typer::new(env, fuel);
            match typer.check(&mut Context::new(), &r, &t.ty) {
                Ok(()) => {}
                Err(e) if e.is_fuel() => return Check::Unknown,
                Err(e) => {
                    return Check::Fail(format!(
                        "{} --{}--> {}: {}",
                        show(env, &t.term),
                        rule.label(),
                        show(env, &r),
                        e.render(Some(&env.registry))
                    ))
                }
            }
        }
        Check::Pass
    })
}

fn nf(env: &Env, t: &Term, fuel: u64) -> Option<Term> {
    normalize(env, t, &mut Fuel::new(fuel)).value()
}

/// Local confluence: any two one-step reducts have the same normal form.
pub fn confluence(env: &Env, terms: &[Typed], fuel: u64) -> Tally {
    run_all(terms, |t| {
        let rs = reducts(env, &t.term);
        if rs.len() < 2 {
            return Check::Skip;
        }
        let mut first: Option<Term> = None;
        for (r, _) in &rs {
            let Some(n) = nf(env, r, fuel) else { return Check::Unknown };
            match &first {
                None => first = Some(n),
                Some(m) if *m == n => {}
                Some(m) => {
                    return Check::Fail(format!("{}: {} vs {}", show(env, &t.term), show(env, m), show(env, &n)))
                }
            }
        }
        Check::Pass
    })
}

/// Normalisation: the full normal form is reached within `fuel`.
pub fn normalization(env: &Env, terms: &[Typed], fuel: u64) -> Tally {
    run_all(terms, |t| match normalize(env, &t.term, &mut Fuel::new(fuel)) {
        Outcome::Value(..) => Check::Pass,
        Outcome::FuelExhausted(_) => Check::Fail(format!("{}: out of fuel", show(env, &t.term))),
    })
}

/// A closed pair related by structural precision.
#[derive(Clone, Debug)]
pub struct Pair {
    pub left: Term,
    pub right: Term,
    /// Type of the left-hand side, in normal form.
    pub ty: Term,
}

impl Pair {
    /// Whether the less precise side mentions `?`.
    pub fn right_is_unknown_free(&self) -> bool {
        !self.right.any(&|t| matches!(t, Term::Unknown(_)))
    }
}

/// Precision pairs derived from each term at up to `per_term` positions:
/// a subterm replaced by `?` at its type, wrapped in a round trip through
/// the unknown type of its level, wrapped in an identity cast, or (on the
/// left) replaced by `err`. Kept only when the result is well typed and
/// structural precision answers Yes.
pub fn precision_pairs(env: &Env, terms: &[Typed], per_term: usize, fuel: u64) -> Vec<Pair> {
    terms
        .par_iter()
        .flat_map_iter(|t| {
            let mut typer = Typer::new(env, fuel);
            let mut out = vec![];
            for (path, ctx, u) in positions(env, &t.term, fuel) {
                let Ok(ty) = typer.infer(&mut ctx.clone(), &u) else { continue };
                let Ok(level) = typer.sort(&mut ctx.clone(), &ty) else { continue };
                let unk = Term::unk_univ(level);
                let cands = [
                    (t.term.clone(), replace_at(&t.term, &path, &Term::unknown(ty.clone()))),
                    (
                        t.term.clone(),
                        replace_at(
                            &t.term,
                            &path,
                            &Term::cast(unk.clone(), ty.clone(), Term::cast(ty.clone(), unk, u.clone())),
                        ),
                    ),
                    (t.term.clone(), replace_at(&t.term, &path, &Term::cast(ty.clone(), ty.clone(), u.clone()))),
                    (replace_at(&t.term, &path, &Term::err(ty.clone())), t.term.clone()),
                ];
                for (l, r) in cands {
                    if l == r || check_closed(env, &r, &t.ty).is_err() || check_closed(env, &l, &t.ty).is_err() {
                        continue;
                    }
                    if struct_precision(env, &DoubleContext::new(), &l, &r, fuel) == TriState::Yes {
                        out.push(Pair { left: l, right: r, ty: t.ty.clone() });
                    }
                }
                if out.len() >= per_term {
                    break;
                }
            }
            out.truncate(per_term);
            out
        })
        .collect()
}

/// Whether the variant's simulation and catch-up claims cover the pair.
fn claimed(env: &Env, p: &Pair) -> bool {
    env.variant != Variant::Norm || p.right_is_unknown_free()
}

/// Simulation: each step of the left side is matched by steps of the right
/// side that preserve precision.
pub fn simulation(env: &Env, pairs: &[Pair], fuel: u64) -> Tally {
    run_all(pairs, |p| {
        if !claimed(env, p) {
            return Check::Skip;
        }
        for (s, rule) in reducts(env, &p.left) {
            match simulate_step(env, &DoubleContext::new(), &p.right, &s, fuel) {
                Simulation::Simulated { .. } => {}
                Simulation::Unknown => return Check::Unknown,
                Simulation::Counterexample => {
                    return Check::Fail(format!(
                        "{} ⊑ {}: step {} to {} not simulated",
                        show(env, &p.left),
                        show(env, &p.right),
                        rule.label(),
                        show(env, &s)
                    ))
                }
            }
        }
        Check::Pass
    })
}

/// Catch-up: the less precise side of a pair whose left side is a universe,
/// type former, abstraction, constructor or `?` reduces to a matching head.
pub fn catch_up_suite(env: &Env, pairs: &[Pair], fuel: u64) -> Tally {
    run_all(pairs, |p| {
        if !claimed(env, p) {
            return Check::Skip;
        }
        match catch_up(env, &p.left, &p.right, fuel) {
            CatchUp::Holds => Check::Pass,
            CatchUp::NotApplicable => Check::Skip,
            CatchUp::Unknown => Check::Unknown,
            CatchUp::Fails(nf) => {
                Check::Fail(format!("{} ⊑ {}: reached {}", show(env, &p.left), show(env, &p.right), show(env, &nf)))
            }
        }
    })
}

/// Monotonicity of consistency: for type pairs `T ⊑ T'` and `S ⊑ S'`,
/// `T ~ S` implies `T' ~ S'`.
pub fn monotonicity(env: &Env, pairs: &[Pair], limit: usize, fuel: u64) -> Tally {
    let types: Vec<&Pair> = pairs.iter().filter(|p| matches!(p.ty, Term::Univ(_))).take(limit).collect();
    let quads: Vec<(&Pair, &Pair)> = types.iter().flat_map(|a| types.iter().map(move |b| (*a, *b))).collect();
    run_all(&quads, |(a, b)| {
        let before = consistent_with(env, &a.left, &b.left, &mut Fuel::new(fuel));
        if before != TriState::Yes {
            return Check::Skip;
        }
        match consistent_with(env, &a.right, &b.right, &mut Fuel::new(fuel)) {
            TriState::Yes => Check::Pass,
            TriState::Unknown => Check::Unknown,
            TriState::No => Check::Fail(format!(
                "{} ~ {} but not {} ~ {}",
                show(env, &a.left),
                show(env, &b.left),
                show(env, &a.right),
                show(env, &b.right)
            )),
        }
    })
}

/// Dynamic gradual guarantee on pairs of inductive type.
pub fn dgg(env: &Env, pairs: &[Pair], fuel: u64) -> Tally {
    run_all(pairs, |p| {
        if !matches!(p.ty, Term::Ind(_)) {
            return Check::Skip;
        }
        match dgg_observe(env, &p.left, &p.right, fuel) {
            Refinement::Refines => Check::Pass,
            Refinement::Unknown { .. } => Check::Unknown,
            Refinement::Violation { left, right } => {
                Check::Fail(format!("{} ⊑ {}: {left:?} vs {right:?}", show(env, &p.left), show(env, &p.right)))
            }
        }
    })
}

/// Agreement of reduction with the discrete model. Out-of-fuel runs count
/// as failures when `must_terminate`, and are skipped otherwise.
pub fn oracle(env: &Env, terms: &[Term], fuel: u64, must_terminate: bool) -> Tally {
    run_all(terms, |t| {
        let r = oracle_compare(env, t, fuel);
        match r.verdict {
            Verdict::Agree => Check::Pass,
            Verdict::NotObservable | Verdict::Unsupported(_) => Check::Skip,
            Verdict::OperationalDiverges | Verdict::ModelDiverges | Verdict::BothDiverge if !must_terminate => {
                Check::Skip
            }
            v => Check::Fail(format!("{}: {v}", show(env, t))),
        }
    })
}

/// Conservativity over the static corpus: the plain type checker and
/// elaboration agree, and erasure undoes elaboration.
pub fn conservativity(env: &Env, fuel: u64) -> (Tally, Vec<String>) {
    let mut tally = Tally::default();
    let mut rejected = vec![];
    for (p, items) in static_corpus() {
        let env = p.env(env.variant);
        for it in items {
            let cic = Typer::new(&env, fuel).infer(&mut Context::new(), &it.source);
            let el = Elaborator::new(&env, fuel).infer(&mut Context::new(), &it.source);
            let r = match (&cic, &el) {
                (Ok(ty), Ok((t, ety))) => {
                    if erase(t).as_ref() == Some(&it.source) && erase(ety).as_ref() == Some(ty) {
                        Check::Pass
                    } else {
                        Check::Fail(format!("{}/{}: erasure does not undo elaboration", it.file, it.name))
                    }
                }
                (Err(_), Err(_)) => {
                    rejected.push(format!("{}/{}", it.file, it.name));
                    Check::Pass
                }
                _ => Check::Fail(format!(
                    "{}/{}: checker {} but elaboration {}",
                    it.file,
                    it.name,
                    if cic.is_ok() { "accepts" } else { "rejects" },
                    if el.is_ok() { "accepts" } else { "rejects" }
                )),
            };
            tally = tally.merge(Tally::one(r));
        }
    }
    (tally, rejected)
}

/// Source-level graduality pair.
#[derive(Clone, Debug)]
pub struct SourcePair {
    pub label: String,
    pub precise: Term,
    pub imprecise: Term,
}

/// `?`-abstractions of the static corpus items that elaborate under `env`,
/// plus those of the static terms in `extra`.
pub fn source_pairs(env: &Env, extra: &[Typed], fuel: u64) -> Vec<(Env, SourcePair)> {
    let mut out = vec![];
    for (p, items) in static_corpus() {
        let penv = p.env(env.variant);
        for it in items {
            if elaborate(&penv, &it.source, fuel).is_none() {
                continue;
            }
            for s in abstractions(&penv, &it.source, fuel) {
                let label = format!("{}/{}", it.file, it.name);
                out.push((penv.clone(), SourcePair { label, precise: it.source.clone(), imprecise: s }));
            }
        }
    }
    for t in extra.iter().filter(|t| t.term.is_static()) {
        for s in abstractions(env, &t.term, fuel) {
            out.push((env.clone(), SourcePair { label: show(env, &t.term), precise: t.term.clone(), imprecise: s }));
        }
    }
    out
}

/// Elaboration graduality: the imprecise side elaborates, and the results
/// and their types are related by structural precision.
pub fn graduality(pairs: &[(Env, SourcePair)], fuel: u64) -> Tally {
    run_all(pairs, |(env, p)| {
        let Some((t, ty)) = elaborate(env, &p.precise, fuel) else { return Check::Skip };
        let Some((t2, ty2)) = elaborate(env, &p.imprecise, fuel) else {
            return Check::Fail(format!("{}: {} does not elaborate", p.label, show(env, &p.imprecise)));
        };
        let dc = DoubleContext::new();
        match (struct_precision(env, &dc, &t, &t2, fuel), struct_precision(env, &dc, &ty, &ty2, fuel)) {
            (TriState::Yes, TriState::Yes) => Check::Pass,
            (TriState::Unknown, _) | (_, TriState::Unknown) => Check::Unknown,
            (a, b) => Check::Fail(format!("{}: {} ⊑ {} is {a:?}, types {b:?}", p.label, show(env, &t), show(env, &t2))),
        }
    })
}
