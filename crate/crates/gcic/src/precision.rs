//! Precision. Syntactic precision on source terms; structural precision
//! (`⊑α`) and its reduction closure (`⊑↝`) on cast-calculus terms, both
//! typed over a double context; and the harnesses built on top of them:
//! one-step simulation, catch-up checks and observational refinement.

use crate::convert::TriState;
use crate::env::Env;
use crate::reduce::{normalize, reducts, step_full, whnf, whnf_step, Fuel, Outcome};
use crate::syntax::{Context, Hint, Level, Name, Term, NAT};
use crate::typing::{branch_arg_types, fix_type, rect_cons_ctx, rect_motive_ctx, TResult, Typer};
use std::collections::{HashSet, VecDeque};

/// `s ⊑G t` on source terms: congruence plus `t ⊑G ?@i`.
pub fn syn_precision_gcic(s: &Term, t: &Term) -> bool {
    if matches!(t, Term::SurfaceUnknown(_)) {
        return true;
    }
    if !s.same_shape(t) {
        return false;
    }
    let (cs, ct) = (s.children(), t.children());
    cs.len() == ct.len() && cs.iter().zip(&ct).all(|((_, a), (_, b))| syn_precision_gcic(a, b))
}

/// Each variable carries a type on either side.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DoubleContext {
    pub decls: Vec<(Hint, Term, Term)>,
}

impl DoubleContext {
    pub fn new() -> DoubleContext {
        DoubleContext::default()
    }
    /// Both sides equal to `ctx`.
    pub fn diagonal(ctx: &Context) -> DoubleContext {
        DoubleContext { decls: ctx.decls.iter().map(|d| (d.hint.clone(), d.ty.clone(), d.ty.clone())).collect() }
    }
    pub fn len(&self) -> usize {
        self.decls.len()
    }
    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }
    pub fn push(&mut self, hint: Hint, left: Term, right: Term) {
        self.decls.push((hint, left, right));
    }
    pub fn pop(&mut self) {
        self.decls.pop();
    }
    pub fn left(&self) -> Context {
        let mut c = Context::new();
        for (h, l, _) in &self.decls {
            c.push(h.clone(), l.clone());
        }
        c
    }
    pub fn right(&self) -> Context {
        let mut c = Context::new();
        for (h, _, r) in &self.decls {
            c.push(h.clone(), r.clone());
        }
        c
    }
    pub fn names(&self) -> Vec<Name> {
        self.decls.iter().map(|(h, ..)| h.0.clone()).collect()
    }
}

/// Where a negative precision answer was decided.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blame {
    pub rule: &'static str,
    pub left: Term,
    pub right: Term,
    /// Binder names in scope, outermost first.
    pub names: Vec<Name>,
}

/// A precision checker sharing one reduction budget across all judgements,
/// including the typing side conditions.
pub struct Precision<'a> {
    pub env: &'a Env,
    pub fuel: Fuel,
    blame: Option<Blame>,
}

macro_rules! premise {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

fn all(items: impl IntoIterator<Item = TriState>) -> TriState {
    let mut acc = TriState::Yes;
    for s in items {
        match s {
            TriState::No => return TriState::No,
            TriState::Unknown => acc = TriState::Unknown,
            TriState::Yes => {}
        }
    }
    acc
}

fn diag_name(t: &Term) -> &'static str {
    match t {
        Term::Univ(_) => "Diag-Univ",
        Term::Pi(..) => "Diag-Prod",
        Term::Lam(..) => "Diag-Abs",
        Term::App(..) => "Diag-App",
        Term::Var(_) => "Diag-Var",
        Term::Cast(..) => "Diag-Cast",
        Term::Ind(_) => "Diag-Ind",
        Term::Ctor(_) => "Diag-Cons",
        Term::Match(_) => "Diag-Fix",
        Term::Vec(..) => "Diag-Vec",
        Term::Nil(_) => "Diag-Nil",
        Term::Cons(_) => "Diag-VCons",
        Term::VecRect(_) => "Diag-VecRect",
        Term::Unknown(_) => "Unk",
        Term::Err(_) => "Err",
        Term::SurfaceUnknown(_) => "Surface",
    }
}

impl<'a> Precision<'a> {
    pub fn new(env: &'a Env, fuel: u64) -> Precision<'a> {
        Precision { env, fuel: Fuel::new(fuel), blame: None }
    }

    /// The first failure recorded by the last negative answer.
    pub fn blame(&self) -> Option<&Blame> {
        self.blame.as_ref()
    }

    fn typed<T>(&mut self, f: impl FnOnce(&mut Typer<'a>) -> TResult<T>) -> Result<T, TriState> {
        let mut typer = Typer { env: self.env, fuel: self.fuel };
        let r = f(&mut typer);
        self.fuel = typer.fuel;
        r.map_err(|e| if e.is_fuel() { TriState::Unknown } else { TriState::No })
    }

    fn infer_left(&mut self, dc: &DoubleContext, t: &Term) -> Result<Term, TriState> {
        let mut ctx = dc.left();
        self.typed(|ty| ty.infer(&mut ctx, t))
    }

    fn infer_right(&mut self, dc: &DoubleContext, t: &Term) -> Result<Term, TriState> {
        let mut ctx = dc.right();
        self.typed(|ty| ty.infer(&mut ctx, t))
    }

    /// `Γ ⊢ t ⊑α u`
    pub fn alpha(&mut self, dc: &mut DoubleContext, t: &Term, u: &Term) -> TriState {
        if t == u {
            return TriState::Yes;
        }
        if self.fuel.exhausted() {
            return TriState::Unknown;
        }
        let outer = self.blame.take();
        let mut first_rule = None;
        let mut r = TriState::No;
        if t.same_shape(u) {
            first_rule = Some(diag_name(t));
            r = self.diagonal(dc, t, u);
        }
        if r != TriState::Yes {
            if let Term::Err(a) = t {
                first_rule.get_or_insert("Err");
                r = r.or(|| self.rule_err(dc, a, u));
            }
        }
        if r != TriState::Yes {
            if let Term::Lam(h, a, body) = t {
                if let Term::Err(b) = &**body {
                    first_rule.get_or_insert("Err-Lambda");
                    r = r.or(|| self.rule_err_lambda(dc, h, a, b, u));
                }
            }
        }
        if r != TriState::Yes {
            if let Term::Unknown(b) = u {
                first_rule.get_or_insert("Unk");
                r = r.or(|| self.rule_unk(dc, t, b));
                if let Term::Univ(j) = &**b {
                    r = r.or(|| self.rule_unk_univ(dc, t, *j));
                }
            }
        }
        if r != TriState::Yes {
            if let Term::Cast(a, b, inner) = u {
                first_rule.get_or_insert("Cast-R");
                r = r.or(|| self.rule_cast_r(dc, t, a, b, inner));
            }
        }
        if r != TriState::Yes {
            if let Term::Cast(a, b, inner) = t {
                first_rule.get_or_insert("Cast-L");
                r = r.or(|| self.rule_cast_l(dc, a, b, inner, u));
            }
        }
        match r {
            TriState::Yes => self.blame = outer,
            _ => {
                if outer.is_some() {
                    self.blame = outer;
                } else if self.blame.is_none() {
                    self.blame = Some(Blame {
                        rule: first_rule.unwrap_or("no rule applies"),
                        left: t.clone(),
                        right: u.clone(),
                        names: dc.names(),
                    });
                }
            }
        }
        r
    }

    fn under(&mut self, dc: &mut DoubleContext, binds: Vec<(Hint, Term, Term)>, t: &Term, u: &Term) -> TriState {
        let n = binds.len();
        dc.decls.extend(binds);
        let r = self.alpha(dc, t, u);
        dc.decls.truncate(dc.decls.len() - n);
        r
    }

    fn pairwise(&mut self, dc: &mut DoubleContext, xs: &[Term], ys: &[Term]) -> TriState {
        if xs.len() != ys.len() {
            return TriState::No;
        }
        let mut acc = TriState::Yes;
        for (x, y) in xs.iter().zip(ys) {
            acc = all([acc, self.alpha(dc, x, y)]);
            if acc == TriState::No {
                break;
            }
        }
        acc
    }

    fn diagonal(&mut self, dc: &mut DoubleContext, t: &Term, u: &Term) -> TriState {
        match (t, u) {
            (Term::Univ(i), Term::Univ(j)) => (i == j).into(),
            (Term::Var(i), Term::Var(j)) => (i == j).into(),
            (Term::Pi(h, a, b), Term::Pi(_, a2, b2)) => {
                self.alpha(dc, a, a2).and(|| self.under(dc, vec![(h.clone(), (**a).clone(), (**a2).clone())], b, b2))
            }
            (Term::Lam(h, a, b), Term::Lam(_, a2, b2)) => self
                .definitional(dc, a, a2)
                .and(|| self.under(dc, vec![(h.clone(), (**a).clone(), (**a2).clone())], b, b2)),
            (Term::App(f, x), Term::App(f2, x2)) => self.alpha(dc, f, f2).and(|| self.alpha(dc, x, x2)),
            (Term::Cast(a, b, x), Term::Cast(a2, b2, x2)) => {
                self.alpha(dc, a, a2).and(|| self.alpha(dc, b, b2)).and(|| self.alpha(dc, x, x2))
            }
            (Term::Ind(i), Term::Ind(j)) => self.pairwise(dc, &i.params, &j.params),
            (Term::Ctor(c), Term::Ctor(d)) => {
                self.pairwise(dc, &c.params, &d.params).and(|| self.pairwise(dc, &c.args, &d.args))
            }
            (Term::Match(_), Term::Match(_)) => self.diag_fix(dc, t, u),
            (Term::Vec(_, a, n), Term::Vec(_, a2, n2)) => self.alpha(dc, a, a2).and(|| self.alpha(dc, n, n2)),
            (Term::Nil(a), Term::Nil(b)) => self.alpha(dc, &a.elem, &b.elem),
            (Term::Cons(a), Term::Cons(b)) => self.pairwise(
                dc,
                &[a.elem.clone(), a.head.clone(), a.len.clone(), a.tail.clone()],
                &[b.elem.clone(), b.head.clone(), b.len.clone(), b.tail.clone()],
            ),
            (Term::VecRect(_), Term::VecRect(_)) => self.diag_rect(dc, t, u),
            _ => TriState::No,
        }
    }

    fn diag_fix(&mut self, dc: &mut DoubleContext, t: &Term, u: &Term) -> TriState {
        let (Term::Match(m), Term::Match(m2)) = (t, u) else { return TriState::No };
        let r = self.alpha(dc, &m.scrutinee, &m2.scrutinee);
        if r == TriState::No {
            return r;
        }
        let (l1, a1) = premise!({
            let mut ctx = dc.left();
            self.typed(|ty| ty.infer_ind(&mut ctx, &m.scrutinee, &m.ind))
        });
        let (l2, a2) = premise!({
            let mut ctx = dc.right();
            self.typed(|ty| ty.infer_ind(&mut ctx, &m2.scrutinee, &m2.ind))
        });
        let ind1 = Term::ind(&m.ind, l1, a1.clone());
        let ind2 = Term::ind(&m2.ind, l2, a2.clone());
        let r = r.and(|| self.under(dc, vec![(m.as_hint.clone(), ind1, ind2)], &m.motive, &m2.motive));
        if r == TriState::No {
            return r;
        }
        let reg = self.env.registry.clone();
        let f1 = fix_type(m, l1, &a1);
        let f2 = fix_type(m2, l2, &a2);
        let mut acc = r;
        for (k, (b1, b2)) in m.branches.iter().zip(&m2.branches).enumerate() {
            let (Ok(x1), Ok(x2)) =
                (branch_arg_types(&reg, &m.ind, l1, &a1, k), branch_arg_types(&reg, &m2.ind, l2, &a2, k))
            else {
                return TriState::No;
            };
            let mut binds = vec![(m.fix_hint.clone(), f1.clone(), f2.clone())];
            binds.extend(b1.hints.iter().zip(x1.into_iter().zip(x2)).map(|(h, ((_, l), (_, r)))| (h.clone(), l, r)));
            acc = all([acc, self.under(dc, binds, &b1.body, &b2.body)]);
            if acc == TriState::No {
                break;
            }
        }
        acc
    }

    fn diag_rect(&mut self, dc: &mut DoubleContext, t: &Term, u: &Term) -> TriState {
        let (Term::VecRect(r1), Term::VecRect(r2)) = (t, u) else { return TriState::No };
        let r = self.alpha(dc, &r1.scrutinee, &r2.scrutinee);
        if r == TriState::No {
            return r;
        }
        let (l1, e1, _) = premise!({
            let mut ctx = dc.left();
            self.typed(|ty| ty.infer_vec(&mut ctx, &r1.scrutinee))
        });
        let (l2, e2, _) = premise!({
            let mut ctx = dc.right();
            self.typed(|ty| ty.infer_vec(&mut ctx, &r2.scrutinee))
        });
        let [n1, v1] = rect_motive_ctx(l1, &e1);
        let [n2, v2] = rect_motive_ctx(l2, &e2);
        let h = &r1.motive_hints;
        let r = r
            .and(|| self.under(dc, vec![(h[0].clone(), n1, n2), (h[1].clone(), v1, v2)], &r1.motive, &r2.motive))
            .and(|| self.alpha(dc, &r1.nil_case, &r2.nil_case));
        if r == TriState::No {
            return r;
        }
        let binds = r1
            .cons_hints
            .iter()
            .zip(rect_cons_ctx(r1, l1, &e1).into_iter().zip(rect_cons_ctx(r2, l2, &e2)))
            .map(|(h, (a, b))| (h.clone(), a, b))
            .collect();
        r.and(|| self.under(dc, binds, &r1.cons_case, &r2.cons_case))
    }

    fn rule_err(&mut self, dc: &mut DoubleContext, a: &Term, u: &Term) -> TriState {
        let ty = premise!(self.infer_right(dc, u));
        self.definitional(dc, a, &ty)
    }

    fn rule_err_lambda(&mut self, dc: &mut DoubleContext, h: &Hint, a: &Term, b: &Term, u: &Term) -> TriState {
        let (a2, b2) = premise!({
            let mut ctx = dc.left();
            self.typed(|ty| ty.infer_pi(&mut ctx, u))
        });
        let pi = Term::Pi(h.clone(), a.clone().into(), b.clone().into());
        let pi2 = Term::Pi(h.clone(), a2.into(), b2.into());
        self.definitional(dc, &pi, &pi2)
    }

    fn rule_unk(&mut self, dc: &mut DoubleContext, t: &Term, b: &Term) -> TriState {
        let ty = premise!(self.infer_left(dc, t));
        self.definitional(dc, &ty, b)
    }

    fn rule_unk_univ(&mut self, dc: &mut DoubleContext, t: &Term, j: Level) -> TriState {
        let i = premise!({
            let mut ctx = dc.left();
            self.typed(|ty| ty.sort(&mut ctx, t))
        });
        (i <= j).into()
    }

    fn rule_cast_r(&mut self, dc: &mut DoubleContext, t: &Term, a: &Term, b: &Term, inner: &Term) -> TriState {
        let ty = premise!(self.infer_left(dc, t));
        self.definitional(dc, &ty, a).and(|| self.definitional(dc, &ty, b)).and(|| self.alpha(dc, t, inner))
    }

    fn rule_cast_l(&mut self, dc: &mut DoubleContext, a: &Term, b: &Term, inner: &Term, u: &Term) -> TriState {
        let ty = premise!(self.infer_right(dc, u));
        self.definitional(dc, a, &ty).and(|| self.definitional(dc, b, &ty)).and(|| self.alpha(dc, inner, u))
    }

    /// Weak-head reduction sequence of `t`, paid from the shared budget.
    /// The flag is false when the budget ran out first.
    fn head_chain(&mut self, t: &Term) -> (Vec<Term>, bool) {
        let mut chain = vec![t.clone()];
        loop {
            let last = chain.last().expect("non-empty");
            match whnf_step(self.env, last) {
                None => return (chain, true),
                Some((next, _)) => {
                    if !self.fuel.take() {
                        return (chain, false);
                    }
                    chain.push(next);
                }
            }
        }
    }

    /// `Γ ⊢ t ⊑↝ u`: weak-head reducts of both sides are compared
    /// alternately, then every reduct of one side against the weak-head
    /// normal form of the other, then full normal forms.
    pub fn definitional(&mut self, dc: &mut DoubleContext, t: &Term, u: &Term) -> TriState {
        if t == u {
            return TriState::Yes;
        }
        let outer = self.blame.take();
        let r = self.definitional_search(dc, t, u);
        if r == TriState::Yes || outer.is_some() {
            self.blame = outer;
        }
        r
    }

    fn definitional_search(&mut self, dc: &mut DoubleContext, t: &Term, u: &Term) -> TriState {
        let mut acc = self.alpha(dc, t, u);
        if acc == TriState::Yes {
            return acc;
        }
        let (ls, lok) = self.head_chain(t);
        let (rs, rok) = self.head_chain(u);
        let mut seen: HashSet<(usize, usize)> = HashSet::from([(0, 0)]);
        let mut tried = |p: &mut Self, dc: &mut DoubleContext, i: usize, j: usize, acc: &mut TriState| -> bool {
            if !seen.insert((i, j)) {
                return false;
            }
            *acc = acc.or(|| p.alpha(dc, &ls[i], &rs[j]));
            *acc == TriState::Yes
        };
        let (nl, nr) = (ls.len() - 1, rs.len() - 1);
        let (mut i, mut j) = (0, 0);
        while i < nl || j < nr {
            if (i <= j && i < nl) || j == nr {
                i += 1;
            } else {
                j += 1;
            }
            if tried(self, dc, i, j, &mut acc) {
                return acc;
            }
        }
        for j in 0..=nr {
            if tried(self, dc, nl, j, &mut acc) {
                return acc;
            }
        }
        for i in 0..=nl {
            if tried(self, dc, i, nr, &mut acc) {
                return acc;
            }
        }
        if !(lok && rok) {
            return acc.or(|| TriState::Unknown);
        }
        let l = normalize(self.env, &ls[nl], &mut self.fuel);
        let r = normalize(self.env, &rs[nr], &mut self.fuel);
        match (l, r) {
            (Outcome::Value(l, _), Outcome::Value(r, _)) => {
                if l == ls[nl] && r == rs[nr] {
                    acc
                } else {
                    acc.or(|| self.alpha(dc, &l, &r))
                }
            }
            _ => acc.or(|| TriState::Unknown),
        }
    }
}

/// `Γ ⊢ t ⊑α u`
pub fn struct_precision(env: &Env, dc: &DoubleContext, t: &Term, u: &Term, fuel: u64) -> TriState {
    Precision::new(env, fuel).alpha(&mut dc.clone(), t, u)
}

/// `Γ ⊢ t ⊑↝ u`
pub fn def_precision(env: &Env, dc: &DoubleContext, t: &Term, u: &Term, fuel: u64) -> TriState {
    Precision::new(env, fuel).definitional(&mut dc.clone(), t, u)
}

/// Precision in both directions.
pub fn equiprecise(env: &Env, dc: &DoubleContext, t: &Term, u: &Term, fuel: u64) -> TriState {
    let mut p = Precision::new(env, fuel);
    let mut dc2 = dc.clone();
    let sym = DoubleContext { decls: dc.decls.iter().map(|(h, l, r)| (h.clone(), r.clone(), l.clone())).collect() };
    p.alpha(&mut dc2, t, u).and(|| p.alpha(&mut sym.clone(), u, t))
}

/// Outcome of trying to match one reduction step of the more precise term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Simulation {
    /// `u` reduces in `steps` steps to `target`, and the reduct of `t` is
    /// structurally more precise than `target`.
    Simulated {
        target: Term,
        steps: usize,
    },
    /// No candidate was found among the explored reducts.
    Counterexample,
    Unknown,
}

/// Bounds for the breadth-first search over reducts of the less precise side.
const SIM_MAX_DEPTH: usize = 6;
const SIM_MAX_NODES: usize = 400;
const SIM_MAX_CHAIN: usize = 200;

/// Given `t ⊑α u` and a one-step reduct `s` of `t`, looks for `u ⇝* u'`
/// with `s ⊑α u'`. Candidates are the leftmost-outermost reduction
/// sequence of `u` and a bounded breadth-first search over all reducts.
pub fn simulate_step(env: &Env, dc: &DoubleContext, u: &Term, s: &Term, fuel: u64) -> Simulation {
    let mut p = Precision::new(env, fuel);
    let mut dc = dc.clone();
    let mut unknown = false;
    let mut check = |p: &mut Precision, c: &Term| match p.alpha(&mut dc, s, c) {
        TriState::Yes => true,
        TriState::Unknown => {
            unknown = true;
            false
        }
        TriState::No => false,
    };
    let mut cur = u.clone();
    for steps in 0..=SIM_MAX_CHAIN {
        if check(&mut p, &cur) {
            return Simulation::Simulated { target: cur, steps };
        }
        match step_full(env, &cur) {
            Some((next, _)) => cur = next,
            None => break,
        }
    }
    let mut seen = HashSet::from([u.clone()]);
    let mut queue = VecDeque::from([(u.clone(), 0usize)]);
    while let Some((c, d)) = queue.pop_front() {
        if d > 0 && check(&mut p, &c) {
            return Simulation::Simulated { target: c, steps: d };
        }
        if d == SIM_MAX_DEPTH || seen.len() > SIM_MAX_NODES {
            continue;
        }
        for (next, _) in reducts(env, &c) {
            if seen.insert(next.clone()) {
                queue.push_back((next, d + 1));
            }
        }
    }
    if unknown || p.fuel.exhausted() {
        Simulation::Unknown
    } else {
        Simulation::Counterexample
    }
}

/// What the catch-up check concluded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CatchUp {
    Holds,
    /// The less precise side reached this weak-head normal form, which has
    /// neither the expected head nor the allowed `?`.
    Fails(Term),
    /// The more precise side has no head that catch-up speaks about.
    NotApplicable,
    Unknown,
}

/// For closed `t ⊑α u` where `t` is a universe, a type former, a
/// λ-abstraction, a constructor or an unknown at an inductive type, checks
/// that `u` reduces to something with the same head, or to an allowed `?`.
pub fn catch_up(env: &Env, t: &Term, u: &Term, fuel: u64) -> CatchUp {
    let mut p = Precision::new(env, fuel);
    let mut dc = DoubleContext::new();
    let ty_u = match p.infer_right(&dc, u) {
        Ok(ty) => ty,
        Err(_) => return CatchUp::NotApplicable,
    };
    let ty_u = match whnf(env, &ty_u, &mut p.fuel) {
        Outcome::Value(v, _) => v,
        Outcome::FuelExhausted(_) => return CatchUp::Unknown,
    };
    let level_of = |p: &mut Precision, t: &Term| -> Option<Level> {
        let mut ctx = Context::new();
        p.typed(|ty| ty.sort(&mut ctx, t)).ok()
    };
    let nf = match whnf(env, u, &mut p.fuel) {
        Outcome::Value(v, _) => v,
        Outcome::FuelExhausted(_) => return CatchUp::Unknown,
    };
    let related = |p: &mut Precision, dc: &mut DoubleContext, a: &Term, b: &Term| -> TriState {
        p.alpha(dc, a, b).or(|| {
            let mut f = Fuel::new(p.fuel.remaining);
            match normalize(env, b, &mut f) {
                Outcome::Value(b, _) => p.alpha(dc, a, &b),
                Outcome::FuelExhausted(_) => TriState::Unknown,
            }
        })
    };
    let verdict = |ok: TriState, nf: &Term| match ok {
        TriState::Yes => CatchUp::Holds,
        TriState::No => CatchUp::Fails(nf.clone()),
        TriState::Unknown => CatchUp::Unknown,
    };
    let unk_univ_above = |nf: &Term, i: Level, strict: bool| match nf {
        Term::Unknown(b) => match &**b {
            Term::Univ(j) => {
                if strict {
                    i < *j
                } else {
                    i <= *j
                }
            }
            _ => false,
        },
        _ => false,
    };
    match t {
        Term::Univ(i) => verdict((nf == Term::Univ(*i) || unk_univ_above(&nf, *i, true)).into(), &nf),
        Term::Unknown(b) if matches!(&**b, Term::Univ(_)) => {
            let Term::Univ(i) = &**b else { unreachable!() };
            verdict(unk_univ_above(&nf, *i, false).into(), &nf)
        }
        Term::Pi(..) | Term::Ind(_) => {
            let Some(i) = level_of(&mut p, t) else { return CatchUp::NotApplicable };
            if unk_univ_above(&nf, i, false) {
                return CatchUp::Holds;
            }
            if !nf.same_shape(t) && !matches!((t, &nf), (Term::Ind(a), Term::Ind(b)) if a.name == b.name) {
                return CatchUp::Fails(nf);
            }
            verdict(related(&mut p, &mut dc, t, &nf), &nf)
        }
        Term::Lam(_, _, body) => {
            if matches!(&**body, Term::Err(_)) || !matches!(ty_u, Term::Pi(..)) {
                return CatchUp::NotApplicable;
            }
            if !matches!(nf, Term::Lam(..)) {
                return CatchUp::Fails(nf);
            }
            verdict(related(&mut p, &mut dc, t, &nf), &nf)
        }
        Term::Ctor(c) => {
            if !matches!(&ty_u, Term::Ind(i) if i.name == c.ind) {
                return CatchUp::NotApplicable;
            }
            match &nf {
                Term::Unknown(_) => CatchUp::Holds,
                Term::Ctor(d) if d.ind == c.ind && d.idx == c.idx => verdict(related(&mut p, &mut dc, t, &nf), &nf),
                _ => CatchUp::Fails(nf),
            }
        }
        Term::Unknown(b) if matches!(&**b, Term::Ind(_)) => {
            if !matches!((&**b, &ty_u), (Term::Ind(a), Term::Ind(c)) if a.name == c.name) {
                return CatchUp::NotApplicable;
            }
            match &nf {
                Term::Unknown(b2) => verdict(p.definitional(&mut dc, b, b2), &nf),
                _ => CatchUp::Fails(nf),
            }
        }
        _ => CatchUp::NotApplicable,
    }
}

/// What a closed program of inductive type is observed to do.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Observation {
    /// A constructor value.
    Value(Term),
    /// `?` at the inductive type.
    Unknown,
    Error,
    /// Out of fuel, taken as divergence.
    Diverges,
    /// Some other weak-head normal form.
    Other(Term),
}

pub fn observe(env: &Env, t: &Term, fuel: u64) -> Observation {
    match whnf(env, t, &mut Fuel::new(fuel)) {
        Outcome::FuelExhausted(_) => Observation::Diverges,
        Outcome::Value(v, _) => match v {
            Term::Ctor(_) => Observation::Value(v),
            Term::Unknown(_) => Observation::Unknown,
            Term::Err(_) => Observation::Error,
            v => Observation::Other(v),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Refinement {
    Refines,
    Violation {
        left: Observation,
        right: Observation,
    },
    /// The more precise side ran out of fuel, so nothing can be concluded,
    /// or the less precise one did while the other produced a value.
    Unknown {
        left: Observation,
        right: Observation,
    },
}

/// Plugs `t` for the hole, which is variable 0 of `context`.
pub fn plug(context: &Term, t: &Term) -> Term {
    context.subst1(t)
}

/// Observational refinement of two closed programs `t ⊑α u`: a value of
/// `t` must be matched by the same value or `?` in `u`; `?` must be
/// matched by `?`; errors of `t` allow anything.
pub fn dgg_observe(env: &Env, t: &Term, u: &Term, fuel: u64) -> Refinement {
    let left = observe(env, t, fuel);
    let right = observe(env, u, fuel);
    use Observation as O;
    let ok = match (&left, &right) {
        (O::Error, _) => Some(true),
        (O::Diverges, _) => None,
        (_, O::Diverges) => None,
        (O::Value(v), O::Value(w)) => Some(v == w || values_agree(env, v, w, fuel)),
        (O::Value(_), O::Unknown) | (O::Unknown, O::Unknown) => Some(true),
        (O::Other(a), O::Other(b)) => Some(a == b),
        _ => Some(false),
    };
    match ok {
        Some(true) => Refinement::Refines,
        Some(false) => Refinement::Violation { left, right },
        None => Refinement::Unknown { left, right },
    }
}

/// Two constructor values agree when their normal forms are α-equal.
fn values_agree(env: &Env, v: &Term, w: &Term, fuel: u64) -> bool {
    match (normalize(env, v, &mut Fuel::new(fuel)), normalize(env, w, &mut Fuel::new(fuel))) {
        (Outcome::Value(a, _), Outcome::Value(b, _)) => a == b,
        _ => false,
    }
}

/// The boolean context `match (• 0) in nat return bool with | O => true |
/// S _ => true end`, as an open term whose hole is variable 0 of type `ℕ → ℕ`.
pub fn apply_zero_context() -> Term {
    use crate::syntax::{Branch, Match};
    Term::Match(std::sync::Arc::new(Match {
        ind: NAT.into(),
        scrutinee: Term::app(Term::Var(0), Term::zero()),
        as_hint: Hint::anon(),
        motive: Term::bool(),
        fix_hint: Hint::anon(),
        branches: vec![
            Branch { hints: vec![], body: Term::boolean(true) },
            Branch { hints: vec![Hint::new("k")], body: Term::boolean(true) },
        ],
    }))
}
