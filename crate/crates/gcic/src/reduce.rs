//! Reduction for the cast calculus: the rewrite rules, one-step full
//! reduction, the weak-head strategy and normalisation, all fuel bounded.

use crate::env::{as_err_univ, as_unk_univ, germ, head_of, is_germ_at, min_germ_level, Env, Head};
use crate::syntax::{Branch, Match, Term};
use crate::vectors;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    Beta,
    Iota,
    ProdUnk,
    ProdErr,
    MatchUnk,
    MatchErr,
    IndUnk,
    IndErr,
    DownUnk,
    DownErr,
    ProdProd,
    UnivUniv,
    IndInd,
    HeadErr,
    DomErr,
    CodomErr,
    ProdGerm,
    IndGerm,
    UpDown,
    SizeErr,
    VNil,
    VNilCons,
    VNilUnk,
    VCons,
    VConsNil,
    VConsUnk,
    VNilu,
    VNiluNil,
    VNiluCons,
    VConsu,
    VConsuNil,
    VConsuCons,
    VUnk,
    VErr,
    VToErr,
    RectNil,
    RectCons,
    RectErr,
    RectUnk,
    RectNilu,
    RectConsu,
}

impl Rule {
    pub fn label(self) -> &'static str {
        use Rule::*;
        match self {
            Beta => "beta",
            Iota => "iota",
            ProdUnk => "Prod-Unk",
            ProdErr => "Prod-Err",
            MatchUnk => "Match-Unk",
            MatchErr => "Match-Err",
            IndUnk => "Ind-Unk",
            IndErr => "Ind-Err",
            DownUnk => "Down-Unk",
            DownErr => "Down-Err",
            ProdProd => "Prod-Prod",
            UnivUniv => "Univ-Univ",
            IndInd => "Ind-Ind",
            HeadErr => "Head-Err",
            DomErr => "Dom-Err",
            CodomErr => "Codom-Err",
            ProdGerm => "Prod-Germ",
            IndGerm => "Ind-Germ",
            UpDown => "Up-Down",
            SizeErr => "Size-Err",
            VNil => "V-nil",
            VNilCons => "V-nil-cons",
            VNilUnk => "V-nil-?",
            VCons => "V-cons",
            VConsNil => "V-cons-nil",
            VConsUnk => "V-cons-?",
            VNilu => "V-nilu",
            VNiluNil => "V-nilu-nil",
            VNiluCons => "V-nilu-cons",
            VConsu => "V-consu",
            VConsuNil => "V-consu-nil",
            VConsuCons => "V-consu-cons",
            VUnk => "V-unk",
            VErr => "V-err",
            VToErr => "V-to-err",
            RectNil => "v-rect-nil",
            RectCons => "v-rect-cons",
            RectErr => "v-rect-err",
            RectUnk => "v-rect-unk",
            RectNilu => "v-rect-nilu",
            RectConsu => "v-rect-consu",
        }
    }

    /// Rules that only exist because of `?`, `err` and casts.
    pub fn is_gradual(self) -> bool {
        !matches!(self, Rule::Beta | Rule::Iota | Rule::RectNil | Rule::RectCons)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Classification of a term against the canonical and neutral forms.
/// `Stuck` covers ill-typed terms that are neither and cannot reduce.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Class {
    Canonical,
    Neutral,
    Reducible,
    Stuck,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Value(Term, Class),
    FuelExhausted(Term),
}

impl Outcome {
    pub fn term(&self) -> &Term {
        match self {
            Outcome::Value(t, _) | Outcome::FuelExhausted(t) => t,
        }
    }
    pub fn into_term(self) -> Term {
        match self {
            Outcome::Value(t, _) | Outcome::FuelExhausted(t) => t,
        }
    }
    pub fn value(self) -> Option<Term> {
        match self {
            Outcome::Value(t, _) => Some(t),
            Outcome::FuelExhausted(_) => None,
        }
    }
    pub fn is_exhausted(&self) -> bool {
        matches!(self, Outcome::FuelExhausted(_))
    }
}

/// Rewrite budget shared by a whole computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fuel {
    pub remaining: u64,
    pub spent: u64,
}

pub const DEFAULT_FUEL: u64 = 100_000;

impl Fuel {
    pub fn new(n: u64) -> Fuel {
        Fuel { remaining: n, spent: 0 }
    }
    /// Pays for one rule; false when the budget is gone.
    pub fn take(&mut self) -> bool {
        if self.remaining == 0 {
            return false;
        }
        self.remaining -= 1;
        self.spent += 1;
        true
    }
    pub fn exhausted(&self) -> bool {
        self.remaining == 0
    }
}

impl Default for Fuel {
    fn default() -> Fuel {
        Fuel::new(DEFAULT_FUEL)
    }
}

pub type Tracer<'a> = &'a mut dyn FnMut(Rule, &Term);

fn is_ind_named(t: &Term, name: &str) -> bool {
    matches!(t, Term::Ind(i) if &*i.name == name)
}

fn exc_annot(t: &Term) -> Option<(&Term, bool)> {
    match t {
        Term::Unknown(a) => Some((a, true)),
        Term::Err(a) => Some((a, false)),
        _ => None,
    }
}

fn exc(unk: bool, t: Term) -> Term {
    if unk {
        Term::unknown(t)
    } else {
        Term::err(t)
    }
}

/// Whether `t` is a canonical up-cast `⟨?□i ⇐ germ_i(h)⟩u`; returns `i`, the germ and `u`.
pub fn as_upcast<'a>(env: &Env, t: &'a Term) -> Option<(u32, &'a Term, &'a Term)> {
    if let Term::Cast(a, b, u) = t {
        let i = as_unk_univ(b)?;
        if is_germ_at(env, i, a) {
            return Some((i, a, u));
        }
    }
    None
}

fn iota(m: &Match, c: &crate::syntax::Ctor) -> Term {
    let rec = Term::Match(Arc::new(Match {
        ind: m.ind.clone(),
        scrutinee: Term::Var(0),
        as_hint: m.as_hint.clone(),
        motive: m.motive.lift(1, 1),
        fix_hint: m.fix_hint.clone(),
        branches: m
            .branches
            .iter()
            .map(|b| Branch { hints: b.hints.clone(), body: b.body.lift(1, 1 + b.hints.len()) })
            .collect(),
    }));
    let f = Term::Lam(m.as_hint.clone(), Arc::new(Term::ind(&c.ind, c.level, c.params.clone())), Arc::new(rec));
    let mut vals = vec![f];
    vals.extend(c.args.iter().cloned());
    m.branches[c.idx].body.instantiate(&vals)
}

fn prod_prod(src: &Term, tgt: &Term, fun: &Term) -> Option<Term> {
    let (Term::Pi(_, a1, b1), Term::Pi(h2, a2, b2), Term::Lam(_, a, t)) = (src, tgt, fun) else { return None };
    let a2l = a2.lift(1, 0);
    let to_dom = Term::cast(a2l.clone(), a1.lift(1, 0), Term::Var(0));
    let to_ann = Term::cast(a2l, a.lift(1, 0), Term::Var(0));
    let b1 = b1.lift(1, 1).subst1(&to_dom);
    let body = t.lift(1, 1).subst1(&to_ann);
    Some(Term::Lam(h2.clone(), a2.clone(), Arc::new(Term::cast(b1, (**b2).clone(), body))))
}

fn ind_ind(env: &Env, tgt: &Term, c: &crate::syntax::Ctor) -> Option<Term> {
    let Term::Ind(ti) = tgt else { return None };
    let reg = &env.registry;
    let src_tys = reg.instantiate_args(&c.ind, c.level, c.idx, &c.params, &c.args).ok()?;
    let mut new_args: Vec<Term> = Vec::with_capacity(c.args.len());
    for (m, b) in c.args.iter().enumerate() {
        let tgt_tys = reg.instantiate_args(&c.ind, ti.level, c.idx, &ti.params, &new_args).ok()?;
        let to = tgt_tys.get(m)?.clone();
        let from = src_tys.get(m)?.clone();
        new_args.push(Term::cast(from, to, b.clone()));
    }
    Some(Term::ctor(&c.ind, c.idx, ti.level, ti.params.clone(), new_args))
}

/// Cast rules that fire once the source `a` is known to have a head.
fn cast_with_head_source(env: &Env, a: &Term, b: &Term, t: &Term) -> Option<(Term, Rule)> {
    let ha = head_of(a)?;
    if as_err_univ(b).is_some() {
        return Some((Term::err(b.clone()), Rule::CodomErr));
    }
    if let Some(i) = as_unk_univ(b) {
        if is_germ_at(env, i, a) {
            return None;
        }
        if let Some(j) = min_germ_level(env, a) {
            if j > i {
                return Some((Term::err(b.clone()), Rule::SizeErr));
            }
        }
        let g = germ(env, i, &ha);
        let inner = Term::cast(a.clone(), g.clone(), t.clone());
        return match ha {
            Head::Pi => Some((Term::cast(g, b.clone(), inner), Rule::ProdGerm)),
            Head::Ind(_) => Some((Term::cast(g, b.clone(), inner), Rule::IndGerm)),
            // □j with j >= i is caught by Size-Err, j < i is the germ itself
            Head::Univ(_) => None,
        };
    }
    let hb = head_of(b)?;
    if ha != hb {
        return Some((Term::err(b.clone()), Rule::HeadErr));
    }
    match (a, b) {
        (Term::Univ(_), Term::Univ(_)) => Some((t.clone(), Rule::UnivUniv)),
        (Term::Pi(..), Term::Pi(..)) => prod_prod(a, b, t).map(|r| (r, Rule::ProdProd)),
        (Term::Ind(ia), Term::Ind(_)) => match t {
            Term::Ctor(c) if c.ind == ia.name => ind_ind(env, b, c).map(|r| (r, Rule::IndInd)),
            Term::Unknown(x) if is_ind_named(x, &ia.name) => Some((Term::unknown(b.clone()), Rule::IndUnk)),
            Term::Err(x) if is_ind_named(x, &ia.name) => Some((Term::err(b.clone()), Rule::IndErr)),
            _ => None,
        },
        (Term::Vec(..), Term::Vec(..)) => vectors::cast_rule(a, b, t),
        _ => None,
    }
}

/// Cast rules whose source is `?_{□i}`.
fn cast_from_unknown(env: &Env, i: u32, b: &Term, t: &Term) -> Option<(Term, Rule)> {
    if let Some((j, g, u)) = as_upcast(env, t) {
        if j == i {
            return Some((Term::cast(g.clone(), b.clone(), u.clone()), Rule::UpDown));
        }
        return None;
    }
    match exc_annot(t) {
        Some((x, unk)) if as_unk_univ(x).is_some() => {
            Some((exc(unk, b.clone()), if unk { Rule::DownUnk } else { Rule::DownErr }))
        }
        _ => None,
    }
}

/// A rule applying at the root of `t`, matched syntactically.
pub fn root_step(env: &Env, t: &Term) -> Option<(Term, Rule)> {
    match t {
        Term::App(f, u) => match &**f {
            Term::Lam(_, _, body) => Some((body.subst1(u), Rule::Beta)),
            _ => None,
        },
        Term::Unknown(a) | Term::Err(a) => {
            let unk = matches!(t, Term::Unknown(_));
            match &**a {
                Term::Pi(h, dom, cod) => Some((
                    Term::Lam(h.clone(), dom.clone(), Arc::new(exc(unk, (**cod).clone()))),
                    if unk { Rule::ProdUnk } else { Rule::ProdErr },
                )),
                _ => None,
            }
        }
        Term::Match(m) => match &m.scrutinee {
            Term::Ctor(c) if c.ind == m.ind && c.idx < m.branches.len() => Some((iota(m, c), Rule::Iota)),
            s @ (Term::Unknown(x) | Term::Err(x)) if is_ind_named(x, &m.ind) => {
                let unk = matches!(s, Term::Unknown(_));
                Some((exc(unk, m.motive.subst1(s)), if unk { Rule::MatchUnk } else { Rule::MatchErr }))
            }
            _ => None,
        },
        Term::Cast(a, b, u) => {
            if let Some(i) = as_unk_univ(a) {
                return cast_from_unknown(env, i, b, u);
            }
            if as_err_univ(a).is_some() {
                return Some((Term::err((**b).clone()), Rule::DomErr));
            }
            cast_with_head_source(env, a, b, u)
        }
        Term::VecRect(r) => vectors::rect_rule(r),
        _ => None,
    }
}

/// Principal positions, the subterms whose weak-head form decides which
/// rule applies. They are visited in a fixed order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pos {
    Fun,
    Scrut,
    Annot,
    Src,
    Tgt,
    SrcIdx,
    TgtIdx,
    Body,
}

/// Next principal position of `t` once every position up to `prev` is canonical.
fn next_pos(env: &Env, t: &Term, prev: Option<Pos>) -> Option<Pos> {
    match (t, prev) {
        (Term::App(..), None) => Some(Pos::Fun),
        (Term::Match(_) | Term::VecRect(_), None) => Some(Pos::Scrut),
        (Term::Unknown(_) | Term::Err(_), None) => Some(Pos::Annot),
        (Term::Cast(..), None) => (as_upcast(env, t).is_none()).then_some(Pos::Src),
        (Term::Cast(a, _, _), Some(Pos::Src)) => {
            if as_unk_univ(a).is_some() {
                Some(Pos::Body)
            } else if head_of(a).is_some() {
                Some(Pos::Tgt)
            } else {
                None
            }
        }
        (Term::Cast(a, b, _), Some(Pos::Tgt)) => match (head_of(a), head_of(b)) {
            (Some(ha), Some(hb)) if ha == hb => match &**a {
                Term::Vec(..) => Some(Pos::SrcIdx),
                Term::Pi(..) | Term::Ind(_) => Some(Pos::Body),
                _ => None,
            },
            _ => None,
        },
        (Term::Cast(..), Some(Pos::SrcIdx)) => Some(Pos::TgtIdx),
        (Term::Cast(..), Some(Pos::TgtIdx)) => Some(Pos::Body),
        _ => None,
    }
}

fn get(t: &Term, p: Pos) -> &Term {
    match (t, p) {
        (Term::App(f, _), Pos::Fun) => f,
        (Term::Match(m), Pos::Scrut) => &m.scrutinee,
        (Term::VecRect(r), Pos::Scrut) => &r.scrutinee,
        (Term::Unknown(a) | Term::Err(a), Pos::Annot) => a,
        (Term::Cast(a, _, _), Pos::Src) => a,
        (Term::Cast(_, b, _), Pos::Tgt) => b,
        (Term::Cast(_, _, u), Pos::Body) => u,
        (Term::Cast(a, _, _), Pos::SrcIdx) => match &**a {
            Term::Vec(_, _, n) => n,
            _ => unreachable!("index position of a non-vector cast"),
        },
        (Term::Cast(_, b, _), Pos::TgtIdx) => match &**b {
            Term::Vec(_, _, n) => n,
            _ => unreachable!("index position of a non-vector cast"),
        },
        _ => unreachable!("position {p:?} absent"),
    }
}

fn set(t: Term, p: Pos, v: Term) -> Term {
    let v = Arc::new(v);
    match (t, p) {
        (Term::App(_, u), Pos::Fun) => Term::App(v, u),
        (Term::Match(m), Pos::Scrut) => {
            let mut m = Arc::unwrap_or_clone(m);
            m.scrutinee = Arc::unwrap_or_clone(v);
            Term::Match(Arc::new(m))
        }
        (Term::VecRect(r), Pos::Scrut) => {
            let mut r = Arc::unwrap_or_clone(r);
            r.scrutinee = Arc::unwrap_or_clone(v);
            Term::VecRect(Arc::new(r))
        }
        (Term::Unknown(_), Pos::Annot) => Term::Unknown(v),
        (Term::Err(_), Pos::Annot) => Term::Err(v),
        (Term::Cast(_, b, u), Pos::Src) => Term::Cast(v, b, u),
        (Term::Cast(a, _, u), Pos::Tgt) => Term::Cast(a, v, u),
        (Term::Cast(a, b, _), Pos::Body) => Term::Cast(a, b, v),
        (Term::Cast(a, b, u), Pos::SrcIdx) => match &*a {
            Term::Vec(l, e, _) => Term::Cast(Arc::new(Term::Vec(*l, e.clone(), v)), b, u),
            _ => unreachable!(),
        },
        (Term::Cast(a, b, u), Pos::TgtIdx) => match &*b {
            Term::Vec(l, e, _) => Term::Cast(a, Arc::new(Term::Vec(*l, e.clone(), v)), u),
            _ => unreachable!(),
        },
        (_, p) => unreachable!("position {p:?} absent"),
    }
}

/// Class of a term with no root rule whose principal positions are canonical.
fn terminal_class(env: &Env, t: &Term) -> Class {
    match t {
        Term::Var(_) => Class::Neutral,
        Term::Univ(_)
        | Term::Pi(..)
        | Term::Lam(..)
        | Term::Ind(_)
        | Term::Ctor(_)
        | Term::Vec(..)
        | Term::Nil(_)
        | Term::Cons(_) => Class::Canonical,
        Term::Unknown(a) | Term::Err(a) if exc_type_is_canonical(a) => Class::Canonical,
        Term::Cast(..) if as_upcast(env, t).is_some() => Class::Canonical,
        _ => Class::Stuck,
    }
}

/// Annotations for which `?_T` and `err_T` are canonical.
fn exc_type_is_canonical(a: &Term) -> bool {
    matches!(a, Term::Univ(_) | Term::Ind(_) | Term::Vec(..)) || as_unk_univ(a).is_some() || as_err_univ(a).is_some()
}

/// One step of the weak-head strategy, or the class of `t` when it is a
/// weak-head normal form.
pub fn head_step(env: &Env, t: &Term) -> Result<(Term, Rule), Class> {
    let mut prev = None;
    while let Some(p) = next_pos(env, t, prev) {
        match head_step(env, get(t, p)) {
            Ok((s, r)) => return Ok((set(t.clone(), p, s), r)),
            Err(Class::Canonical) => prev = Some(p),
            Err(c) => return Err(c),
        }
    }
    match root_step(env, t) {
        Some(x) => Ok(x),
        None => Err(terminal_class(env, t)),
    }
}

pub fn whnf_step(env: &Env, t: &Term) -> Option<(Term, Rule)> {
    head_step(env, t).ok()
}

/// Classification against the canonical and neutral forms.
pub fn classify(env: &Env, t: &Term) -> Class {
    match head_step(env, t) {
        Ok(_) => Class::Reducible,
        Err(c) => c,
    }
}

/// Leftmost-outermost one-step reduction with full congruence.
pub fn step_full(env: &Env, t: &Term) -> Option<(Term, Rule)> {
    if let Some(r) = root_step(env, t) {
        return Some(r);
    }
    for (k, (_, c)) in t.children().into_iter().enumerate() {
        if let Some((c2, rule)) = step_full(env, c) {
            return Some((replace_child(t, k, c2), rule));
        }
    }
    None
}

fn replace_child(t: &Term, k: usize, new: Term) -> Term {
    let mut idx = 0;
    let mut new = Some(new);
    t.map_children(|_, orig| {
        let out = if idx == k { new.take().expect("single replacement") } else { orig.clone() };
        idx += 1;
        out
    })
}

/// Every one-step reduct of `t`, at any position.
pub fn reducts(env: &Env, t: &Term) -> Vec<(Term, Rule)> {
    let mut out = Vec::new();
    if let Some(r) = root_step(env, t) {
        out.push(r);
    }
    for (k, (_, c)) in t.children().into_iter().enumerate() {
        for (c2, rule) in reducts(env, c) {
            out.push((replace_child(t, k, c2), rule));
        }
    }
    out
}

/// Weak-head machine: an explicit stack of nodes waiting on one of their
/// principal positions, so that long reductions do not grow the native stack.
struct Machine<'a, 'b> {
    env: &'a Env,
    fuel: &'a mut Fuel,
    trace: Option<Tracer<'b>>,
}

impl Machine<'_, '_> {
    fn run(&mut self, t: Term) -> Outcome {
        let mut stack: Vec<(Term, Pos)> = Vec::new();
        let mut focus = t;
        // `None` means the focus still has to be evaluated
        let mut done: Option<Class> = None;
        loop {
            match done {
                None => {
                    if let Some(p) = next_pos(self.env, &focus, None) {
                        let sub = get(&focus, p).clone();
                        stack.push((focus, p));
                        focus = sub;
                        continue;
                    }
                    match self.root(focus) {
                        Ok(Ok(next)) => focus = next,
                        Ok(Err((t, c))) => {
                            focus = t;
                            done = Some(c);
                        }
                        Err(t) => return exhausted(t, stack),
                    }
                }
                Some(class) => {
                    let Some((node, p)) = stack.pop() else { return Outcome::Value(focus, class) };
                    let node = set(node, p, focus);
                    if class != Class::Canonical {
                        focus = node;
                        continue;
                    }
                    if let Some(q) = next_pos(self.env, &node, Some(p)) {
                        let sub = get(&node, q).clone();
                        stack.push((node, q));
                        focus = sub;
                        done = None;
                        continue;
                    }
                    match self.root(node) {
                        Ok(Ok(next)) => {
                            focus = next;
                            done = None;
                        }
                        Ok(Err((t, c))) => {
                            focus = t;
                            done = Some(c);
                        }
                        Err(t) => return exhausted(t, stack),
                    }
                }
            }
        }
    }

    /// Fires the root rule if any: `Ok(Ok(reduct))`, `Ok(Err((t, class)))`
    /// when none applies, `Err(t)` when out of fuel.
    #[allow(clippy::type_complexity)]
    fn root(&mut self, t: Term) -> Result<Result<Term, (Term, Class)>, Term> {
        match root_step(self.env, &t) {
            None => {
                let c = terminal_class(self.env, &t);
                Ok(Err((t, c)))
            }
            Some((r, rule)) => {
                if !self.fuel.take() {
                    return Err(t);
                }
                if let Some(tr) = self.trace.as_mut() {
                    tr(rule, &t);
                }
                Ok(Ok(r))
            }
        }
    }
}

fn exhausted(mut t: Term, mut stack: Vec<(Term, Pos)>) -> Outcome {
    while let Some((node, p)) = stack.pop() {
        t = set(node, p, t);
    }
    Outcome::FuelExhausted(t)
}

/// Weak-head normal form within the given budget.
pub fn whnf(env: &Env, t: &Term, fuel: &mut Fuel) -> Outcome {
    Machine { env, fuel, trace: None }.run(t.clone())
}

/// Like [`whnf`], reporting every fired rule with its redex.
pub fn whnf_traced(env: &Env, t: &Term, fuel: &mut Fuel, trace: Tracer<'_>) -> Outcome {
    Machine { env, fuel, trace: Some(trace) }.run(t.clone())
}

/// Weak-head normal form with a fresh default budget; the term reached
/// when the budget runs out otherwise.
pub fn whnf_default(env: &Env, t: &Term) -> Term {
    whnf(env, t, &mut Fuel::default()).into_term()
}

fn norm(env: &Env, t: &Term, fuel: &mut Fuel, trace: &mut Option<Tracer<'_>>) -> Result<Term, Term> {
    let out = match trace.as_mut() {
        Some(tr) => Machine { env, fuel, trace: Some(&mut **tr) }.run(t.clone()),
        None => Machine { env, fuel, trace: None }.run(t.clone()),
    };
    let v = match out {
        Outcome::Value(v, _) => v,
        Outcome::FuelExhausted(t) => return Err(t),
    };
    let mut failed = false;
    let r = v.map_children(|_, c| {
        if failed {
            return c.clone();
        }
        match norm(env, c, fuel, trace) {
            Ok(n) => n,
            Err(partial) => {
                failed = true;
                partial
            }
        }
    });
    if failed {
        Err(r)
    } else {
        Ok(r)
    }
}

/// Full normal form: weak-head normalisation, then the subterms.
pub fn normalize(env: &Env, t: &Term, fuel: &mut Fuel) -> Outcome {
    finish(env, norm(env, t, fuel, &mut None))
}

pub fn normalize_traced(env: &Env, t: &Term, fuel: &mut Fuel, trace: Tracer<'_>) -> Outcome {
    finish(env, norm(env, t, fuel, &mut Some(trace)))
}

fn finish(env: &Env, r: Result<Term, Term>) -> Outcome {
    match r {
        Ok(v) => {
            let c = classify(env, &v);
            Outcome::Value(v, c)
        }
        Err(t) => Outcome::FuelExhausted(t),
    }
}

/// Iterates [`step_full`] at most `limit` times.
pub fn normalize_by_steps(env: &Env, t: &Term, limit: usize) -> Option<Term> {
    let mut t = t.clone();
    for _ in 0..limit {
        match step_full(env, &t) {
            Some((s, _)) => t = s,
            None => return Some(t),
        }
    }
    None
}

/// Result of evaluation with a default budget.
pub fn eval(env: &Env, t: &Term) -> Outcome {
    normalize(env, t, &mut Fuel::default())
}
