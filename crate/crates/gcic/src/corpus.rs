//! Test corpora: exhaustive enumeration of small well-typed cast-calculus
//! terms, a seeded random generator built on top of it, the static example
//! programs, and `?`-abstraction of source terms.

use crate::elab::Elaborator;
use crate::env::Env;
use crate::guard;
use crate::program::Program;
use crate::reduce::{normalize, Fuel, Outcome};
use crate::syntax::{Branch, Context, Hint, Level, Match, Term, BOOL, NAT};
use crate::typing::{fix_type, Typer};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{HashMap, HashSet};
use std::rc::Rc;
use std::sync::Arc;

/// A well-typed term with its type in normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Typed {
    pub term: Term,
    pub ty: Term,
}

#[derive(Default)]
struct Layer {
    all: Vec<Typed>,
    by_type: HashMap<Term, Vec<Term>>,
    /// Terms that are types.
    types: Vec<Term>,
    /// Functions with their normalised domain.
    funs: Vec<(Term, Term)>,
}

impl Layer {
    fn of(&self, ty: &Term) -> &[Term] {
        self.by_type.get(ty).map(|v| &v[..]).unwrap_or(&[])
    }
}

/// Exhaustive enumeration of the well-typed terms built from `nat`, `bool`,
/// `Type@0`, their constructors, variables, `?`, `err`, casts, products,
/// abstractions, applications and matches on `bool` and `nat`.
pub struct Enumerator<'a> {
    env: &'a Env,
    fuel: u64,
    memo: HashMap<(Context, usize), Rc<Layer>>,
}

fn match_node(ind: &str, scrutinee: Term, motive: Term, bodies: Vec<(usize, Term)>) -> Term {
    let hint = |s: &str| Hint::new(s);
    Term::Match(Arc::new(Match {
        ind: ind.into(),
        scrutinee,
        as_hint: hint("z"),
        motive,
        fix_hint: hint("f"),
        branches: bodies
            .into_iter()
            .map(|(arity, body)| Branch { hints: (0..arity).map(|_| hint("k")).collect(), body })
            .collect(),
    }))
}

/// Ordered splits of `n` into `parts` positive summands.
fn splits(n: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return if n >= 1 { vec![vec![n]] } else { vec![] };
    }
    let mut out = vec![];
    for first in 1..n {
        for mut rest in splits(n - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl<'a> Enumerator<'a> {
    pub fn new(env: &'a Env, fuel: u64) -> Enumerator<'a> {
        Enumerator { env, fuel, memo: HashMap::new() }
    }

    fn nf(&self, t: &Term) -> Option<Term> {
        match normalize(self.env, t, &mut Fuel::new(self.fuel)) {
            Outcome::Value(v, _) => Some(v),
            Outcome::FuelExhausted(_) => None,
        }
    }

    /// Closed well-typed terms of size at most `max`, smallest first.
    pub fn closed(&mut self, max: usize) -> Vec<Typed> {
        (1..=max).flat_map(|n| self.layer(&Context::new(), n).all.clone()).collect()
    }

    fn layer(&mut self, ctx: &Context, n: usize) -> Rc<Layer> {
        let key = (ctx.clone(), n);
        if let Some(l) = self.memo.get(&key) {
            return l.clone();
        }
        let cands = self.candidates(ctx, n);
        let mut layer = Layer::default();
        let mut typer = Typer::new(self.env, self.fuel);
        for t in cands {
            let mut c = ctx.clone();
            let Ok(ty) = typer.infer(&mut c, &t) else { continue };
            if guard::check(&self.env.registry, &t, ctx.len()).is_err() {
                continue;
            }
            let Some(ty) = self.nf(&ty) else { continue };
            if matches!(ty, Term::Univ(_)) {
                layer.types.push(t.clone());
            }
            if let Term::Pi(_, d, _) = &ty {
                layer.funs.push((t.clone(), (**d).clone()));
            }
            layer.by_type.entry(ty.clone()).or_default().push(t.clone());
            layer.all.push(Typed { term: t, ty });
        }
        let layer = Rc::new(layer);
        self.memo.insert(key, layer.clone());
        layer
    }

    fn candidates(&mut self, ctx: &Context, n: usize) -> Vec<Term> {
        let mut out = vec![];
        if n == 1 {
            out.extend((0..ctx.len()).map(Term::Var));
            out.extend([
                Term::Univ(0),
                Term::nat(),
                Term::bool(),
                Term::zero(),
                Term::boolean(true),
                Term::boolean(false),
            ]);
            return out;
        }
        let sub = self.layer(ctx, n - 1);
        for a in &sub.types {
            out.push(Term::unknown(a.clone()));
            out.push(Term::err(a.clone()));
        }
        for t in sub.of(&Term::nat()) {
            out.push(Term::succ(t.clone()));
        }
        for s in splits(n - 1, 2) {
            let (l, r) = (s[0], s[1]);
            let left = self.layer(ctx, l);
            for a in &left.types {
                let inner = self.layer(&ctx.extend(Hint::new("x"), a.clone()), r);
                for b in &inner.types {
                    out.push(Term::pi("x", a.clone(), b.clone()));
                }
                for b in &inner.all {
                    out.push(Term::lam("x", a.clone(), b.term.clone()));
                }
            }
            let right = self.layer(ctx, r);
            for (f, dom) in &left.funs {
                for u in right.of(dom) {
                    out.push(Term::app(f.clone(), u.clone()));
                }
            }
        }
        for s in splits(n - 1, 3) {
            let (la, lb, lt) = (self.layer(ctx, s[0]), self.layer(ctx, s[1]), self.layer(ctx, s[2]));
            for a in &la.types {
                let Some(key) = self.nf(a) else { continue };
                for t in lt.of(&key) {
                    for b in &lb.types {
                        out.push(Term::cast(a.clone(), b.clone(), t.clone()));
                    }
                }
            }
        }
        for s in splits(n - 1, 4) {
            out.extend(self.matches(ctx, BOOL, &s));
            out.extend(self.matches(ctx, NAT, &s));
        }
        out
    }

    /// Matches with scrutinee, motive and two branch bodies of the given sizes.
    fn matches(&mut self, ctx: &Context, ind: &str, sizes: &[usize]) -> Vec<Term> {
        let ind_ty = Term::ind(ind, 0, vec![]);
        let scruts = self.layer(ctx, sizes[0]);
        let scruts = scruts.of(&ind_ty).to_vec();
        if scruts.is_empty() {
            return vec![];
        }
        let mut out = vec![];
        let motives = self.layer(&ctx.extend(Hint::new("z"), ind_ty.clone()), sizes[1]).types.clone();
        for p in motives {
            let probe = Match {
                ind: ind.into(),
                scrutinee: Term::zero(),
                as_hint: Hint::new("z"),
                motive: p.clone(),
                fix_hint: Hint::new("f"),
                branches: vec![],
            };
            let fix_ctx = ctx.extend(Hint::new("f"), fix_type(&probe, 0, &[]));
            let (first, second) = if ind == BOOL {
                let t = p.lift(1, 1).subst1(&Term::boolean(true));
                let f = p.lift(1, 1).subst1(&Term::boolean(false));
                (
                    self.bodies(&fix_ctx, sizes[2], &t),
                    self.bodies(&fix_ctx, sizes[3], &f).into_iter().map(|b| (0, b)).collect::<Vec<_>>(),
                )
            } else {
                let z = p.lift(1, 1).subst1(&Term::zero());
                let s = p.lift(2, 1).subst1(&Term::succ(Term::Var(0)));
                let s_ctx = fix_ctx.extend(Hint::new("k"), Term::nat());
                (
                    self.bodies(&fix_ctx, sizes[2], &z),
                    self.bodies(&s_ctx, sizes[3], &s).into_iter().map(|b| (1, b)).collect(),
                )
            };
            for b1 in &first {
                for (arity, b2) in &second {
                    for s in &scruts {
                        out.push(match_node(ind, s.clone(), p.clone(), vec![(0, b1.clone()), (*arity, b2.clone())]));
                    }
                }
            }
        }
        out
    }

    fn bodies(&mut self, ctx: &Context, n: usize, target: &Term) -> Vec<Term> {
        let Some(key) = self.nf(target) else { return vec![] };
        self.layer(ctx, n).of(&key).to_vec()
    }
}

/// Seeded random growth from a pool of closed well-typed terms: operands are
/// drawn from the pool and everything generated so far, combined, and kept
/// when the result is well typed, guarded and new.
pub fn generate(env: &Env, base: &[Typed], count: usize, seed: u64, max_size: usize, fuel: u64) -> Vec<Typed> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: HashSet<Term> = base.iter().map(|t| t.term.clone()).collect();
    let mut pool: Vec<Typed> = base.to_vec();
    let types: Vec<Term> =
        base.iter().filter(|t| matches!(t.ty, Term::Univ(_)) && t.term.size() <= 5).map(|t| t.term.clone()).collect();
    let nf = |t: &Term| normalize(env, t, &mut Fuel::new(fuel)).value();
    let mut out = vec![];
    let mut attempts = 0;
    while out.len() < count && attempts < count * 200 {
        attempts += 1;
        let pick = |rng: &mut ChaCha8Rng| pool.choose(rng).cloned().expect("non-empty pool");
        let a = pick(&mut rng);
        let b = pick(&mut rng);
        let ty = types.choose(&mut rng).cloned().unwrap_or_else(Term::nat);
        let cand = match rng.gen_range(0..8) {
            0 | 1 => match &a.ty {
                Term::Pi(_, d, _) if b.ty == **d => Term::app(a.term, b.term),
                Term::Pi(_, d, _) => Term::app(a.term, Term::cast(b.ty.clone(), (**d).clone(), b.term)),
                _ => Term::cast(a.ty, ty, a.term),
            },
            2 => Term::cast(a.ty, ty, a.term),
            3 => match a.ty {
                Term::Ind(ref i) if &*i.name == NAT => Term::succ(a.term),
                _ => Term::unknown(ty),
            },
            4 => Term::lam("x", ty, a.term.lift(1, 0)),
            5 => Term::err(ty),
            _ => {
                let (ind, arity) = if rng.gen_bool(0.5) { (BOOL, 0) } else { (NAT, 1) };
                let scrut = if a.ty == Term::ind(ind, 0, vec![]) {
                    a.term
                } else {
                    Term::cast(a.ty, Term::ind(ind, 0, vec![]), a.term)
                };
                let c = pick(&mut rng);
                let to = |t: Typed| if t.ty == b.ty { t.term } else { Term::cast(t.ty, b.ty.clone(), t.term) };
                match_node(ind, scrut, b.ty.lift(1, 0), vec![(0, b.term.lift(1, 0)), (arity, to(c).lift(1 + arity, 0))])
            }
        };
        if cand.size() > max_size || seen.contains(&cand) {
            continue;
        }
        let Ok(ty) = crate::typing::infer_closed(env, &cand) else { continue };
        if guard::check(&env.registry, &cand, 0).is_err() {
            continue;
        }
        let Some(ty) = nf(&ty) else { continue };
        seen.insert(cand.clone());
        let t = Typed { term: cand, ty };
        pool.push(t.clone());
        out.push(t);
    }
    out
}

pub const STATIC_SOURCES: [(&str, &str); 7] = [
    ("arith", include_str!("../examples/static/arith.gcic")),
    ("bool", include_str!("../examples/static/bool.gcic")),
    ("large_elim", include_str!("../examples/static/large_elim.gcic")),
    ("lists", include_str!("../examples/static/lists.gcic")),
    ("poly", include_str!("../examples/static/poly.gcic")),
    ("printf", include_str!("../examples/static/printf.gcic")),
    ("types", include_str!("../examples/static/types.gcic")),
];

/// One item of the static corpus: a definition body or an `eval` request,
/// with definitions already inlined.
#[derive(Clone, Debug)]
pub struct StaticItem {
    pub file: &'static str,
    pub name: String,
    pub source: Term,
}

/// The static example programs and their items.
pub fn static_corpus() -> Vec<(Program, Vec<StaticItem>)> {
    STATIC_SOURCES
        .iter()
        .map(|(file, src)| {
            let p = Program::load(src).unwrap_or_else(|e| panic!("{file}: {e}"));
            let mut items: Vec<StaticItem> =
                p.defs.iter().map(|d| StaticItem { file, name: d.name.clone(), source: d.source.clone() }).collect();
            items.extend(p.evals.iter().enumerate().map(|(k, e)| StaticItem {
                file,
                name: format!("eval#{k}"),
                source: e.clone(),
            }));
            (p, items)
        })
        .collect()
}

/// Contexts of the immediate subterms of a well-typed `t`, in the order of
/// [`Term::children`].
pub(crate) fn child_contexts(typer: &mut Typer<'_>, ctx: &Context, t: &Term) -> Option<Vec<Context>> {
    Some(match t {
        Term::Pi(h, a, _) | Term::Lam(h, a, _) => vec![ctx.clone(), ctx.extend(h.clone(), (**a).clone())],
        Term::Match(m) => {
            let (level, params) = typer.infer_ind(&mut ctx.clone(), &m.scrutinee, &m.ind).ok()?;
            let mut v = vec![ctx.clone(), ctx.extend(m.as_hint.clone(), Term::ind(&m.ind, level, params.clone()))];
            let fix_ctx = ctx.extend(m.fix_hint.clone(), fix_type(m, level, &params));
            for (k, b) in m.branches.iter().enumerate() {
                let args = crate::typing::branch_arg_types(&typer.env.registry, &m.ind, level, &params, k).ok()?;
                let mut c = fix_ctx.clone();
                for (h, (_, ty)) in b.hints.iter().zip(args) {
                    c.push(h.clone(), ty);
                }
                v.push(c);
            }
            v
        }
        _ => t.children().iter().map(|_| ctx.clone()).collect(),
    })
}

pub fn replace_at(t: &Term, path: &[usize], with: &Term) -> Term {
    match path.split_first() {
        None => with.clone(),
        Some((i, rest)) => {
            let mut k = 0;
            t.map_children(|_, c| {
                let r = if k == *i { replace_at(c, rest, with) } else { c.clone() };
                k += 1;
                r
            })
        }
    }
}

/// Every subterm of a well-typed closed `t` with its position (child indices
/// from the root) and its context. Subterms whose context cannot be
/// computed are skipped together with their descendants.
pub fn positions(env: &Env, t: &Term, fuel: u64) -> Vec<(Vec<usize>, Context, Term)> {
    let mut typer = Typer::new(env, fuel);
    let mut out = vec![];
    let mut stack: Vec<(Vec<usize>, Context, Term)> = vec![(vec![], Context::new(), t.clone())];
    while let Some((path, ctx, u)) = stack.pop() {
        if let Some(ctxs) = child_contexts(&mut typer, &ctx, &u) {
            for (k, ((_, c), cx)) in u.children().into_iter().zip(ctxs).enumerate() {
                let mut p = path.clone();
                p.push(k);
                stack.push((p, cx, c.clone()));
            }
        }
        out.push((path, ctx, u));
    }
    out
}

/// Every single-position `?`-abstraction of a static source term: a subterm
/// `u : T : Type@i` is replaced by `?@i`, which keeps the derivation
/// universe adequate.
pub fn abstractions(env: &Env, s: &Term, fuel: u64) -> Vec<Term> {
    let mut typer = Typer::new(env, fuel);
    positions(env, s, fuel)
        .into_iter()
        .filter_map(|(path, ctx, u)| {
            let level = level_of_type(&mut typer, &ctx, &u)?;
            Some(replace_at(s, &path, &Term::SurfaceUnknown(level)))
        })
        .collect()
}

fn level_of_type(typer: &mut Typer<'_>, ctx: &Context, u: &Term) -> Option<Level> {
    let ty = typer.infer(&mut ctx.clone(), u).ok()?;
    typer.sort(&mut ctx.clone(), &ty).ok()
}

/// Elaborates a closed source term.
pub fn elaborate(env: &Env, s: &Term, fuel: u64) -> Option<(Term, Term)> {
    Elaborator::new(env, fuel).infer(&mut Context::new(), s).ok()
}
