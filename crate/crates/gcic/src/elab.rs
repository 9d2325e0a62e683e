//! Elaboration of gradual source terms into the cast calculus, and erasure
//! back to static terms.

use crate::convert::{consistent_with, TriState};
use crate::env::{as_unk_univ, germ, Env, Head, VEC};
use crate::reduce::{whnf, Fuel, Outcome, DEFAULT_FUEL};
use crate::registry::{Registry, RegistryError};
use crate::syntax::{Branch, Context, Level, Match, Term, VecRect};
use crate::typing::{
    branch_arg_types, branch_target, rect_cons_ctx, rect_cons_target, rect_motive_ctx, rect_nil_target, ErrorKind,
    TResult, TypeError,
};
use std::sync::Arc;

pub struct Elaborator<'a> {
    pub env: &'a Env,
    pub fuel: Fuel,
}

impl<'a> Elaborator<'a> {
    pub fn new(env: &'a Env, fuel: u64) -> Elaborator<'a> {
        Elaborator { env, fuel: Fuel::new(fuel) }
    }

    fn reg(&self) -> &'a Registry {
        &self.env.registry
    }

    fn whnf(&mut self, ctx: &Context, rule: &'static str, t: &Term) -> TResult<Term> {
        match whnf(self.env, t, &mut self.fuel) {
            Outcome::Value(v, _) => Ok(v),
            Outcome::FuelExhausted(_) => Err(TypeError::new(rule, ctx, t, ErrorKind::Fuel)),
        }
    }

    /// `Γ ⊢ s ⇝ t ▷ T`
    pub fn infer(&mut self, ctx: &mut Context, s: &Term) -> TResult<(Term, Term)> {
        macro_rules! fail {
            ($rule:expr, $kind:expr $(,)?) => {
                Err(TypeError::new($rule, ctx, s, $kind))
            };
        }
        match s {
            Term::Var(k) => match ctx.lookup(*k) {
                Some(ty) => Ok((s.clone(), ty)),
                None => fail!("Var", ErrorKind::Unbound(*k)),
            },
            Term::Univ(i) => Ok((s.clone(), Term::Univ(i + 1))),
            Term::SurfaceUnknown(i) => {
                let ty = Term::unk_univ(*i);
                Ok((Term::unknown(ty.clone()), ty))
            }
            Term::Pi(h, a, b) => {
                let (a2, i) = self.sort(ctx, a)?;
                ctx.push(h.clone(), a2.clone());
                let r = self.sort(ctx, b);
                ctx.pop();
                let (b2, j) = r?;
                Ok((Term::Pi(h.clone(), Arc::new(a2), Arc::new(b2)), Term::Univ(self.env.variant.sort_of_pi(i, j))))
            }
            Term::Lam(h, a, body) => {
                let (a2, _) = self.sort(ctx, a)?;
                ctx.push(h.clone(), a2.clone());
                let r = self.infer(ctx, body);
                ctx.pop();
                let (body2, b) = r?;
                let a2 = Arc::new(a2);
                Ok((Term::Lam(h.clone(), a2.clone(), Arc::new(body2)), Term::Pi(h.clone(), a2, Arc::new(b))))
            }
            Term::App(f, u) => {
                let (f2, a, b) = self.infer_pi(ctx, f)?;
                let u2 = self.check(ctx, u, &a)?;
                let ty = b.subst1(&u2);
                Ok((Term::app(f2, u2), ty))
            }
            Term::Ind(i) => {
                let params = self.check_params(ctx, s, &i.name, i.level, &i.params)?;
                Ok((Term::ind(&i.name, i.level, params), Term::Univ(i.level)))
            }
            Term::Ctor(c) => {
                let params = self.check_params(ctx, s, &c.ind, c.level, &c.params)?;
                let arity = match self.reg().ctor_decl(&c.ind, c.idx) {
                    Some(d) => d.args.len(),
                    None => return fail!("Cons", ErrorKind::Registry(RegistryError::Unknown(c.ind.to_string()))),
                };
                if arity != c.args.len() {
                    return fail!(
                        "Cons",
                        ErrorKind::Arity { what: "constructor arguments".into(), expected: arity, found: c.args.len() },
                    );
                }
                let mut args: Vec<Term> = Vec::with_capacity(arity);
                for m in 0..arity {
                    let tys = self
                        .reg()
                        .instantiate_args(&c.ind, c.level, c.idx, &params, &args)
                        .map_err(|e| TypeError::new("Cons", ctx, s, ErrorKind::Registry(e)))?;
                    let a = self.check(ctx, &c.args[m], &tys[m])?;
                    args.push(a);
                }
                let ty = Term::ind(&c.ind, c.level, params.clone());
                Ok((Term::ctor(&c.ind, c.idx, c.level, params, args), ty))
            }
            Term::Match(m) => self.infer_match(ctx, s, m),
            Term::Vec(l, a, n) => {
                let a2 = self.check(ctx, a, &Term::Univ(*l))?;
                let n2 = self.check(ctx, n, &Term::nat())?;
                Ok((Term::vec_ty(*l, a2, n2), Term::Univ(*l)))
            }
            Term::Nil(nl) if !nl.unk => {
                let a2 = self.check(ctx, &nl.elem, &Term::Univ(nl.level))?;
                Ok((Term::nil(false, nl.level, a2.clone()), Term::vec_ty(nl.level, a2, Term::zero())))
            }
            Term::Cons(c) if !c.unk => {
                let a2 = self.check(ctx, &c.elem, &Term::Univ(c.level))?;
                let x2 = self.check(ctx, &c.head, &a2)?;
                let n2 = self.check(ctx, &c.len, &Term::nat())?;
                let v2 = self.check(ctx, &c.tail, &Term::vec_ty(c.level, a2.clone(), n2.clone()))?;
                let ty = Term::vec_ty(c.level, a2.clone(), Term::succ(n2.clone()));
                Ok((Term::cons(false, c.level, a2, x2, n2, v2), ty))
            }
            Term::VecRect(r) => self.infer_rect(ctx, r),
            Term::Unknown(_) | Term::Err(_) | Term::Cast(..) | Term::Nil(_) | Term::Cons(_) => {
                fail!("Elab", ErrorKind::Foreign("a cast-calculus construct"))
            }
        }
    }

    fn check_params(
        &mut self,
        ctx: &mut Context,
        s: &Term,
        ind: &str,
        level: Level,
        params: &[Term],
    ) -> TResult<Vec<Term>> {
        let Some(decl) = self.reg().get(ind) else {
            return Err(TypeError::new("Ind", ctx, s, ErrorKind::Registry(RegistryError::Unknown(ind.into()))));
        };
        if decl.params.len() != params.len() {
            return Err(TypeError::new(
                "Ind",
                ctx,
                s,
                ErrorKind::Arity { what: format!("`{ind}`"), expected: decl.params.len(), found: params.len() },
            ));
        }
        let mut out: Vec<Term> = Vec::with_capacity(params.len());
        for p in params {
            let tys = self
                .reg()
                .instantiate_params(ind, level, &out)
                .map_err(|e| TypeError::new("Ind", ctx, s, ErrorKind::Registry(e)))?;
            let ty = tys[out.len()].clone();
            out.push(self.check(ctx, p, &ty)?);
        }
        Ok(out)
    }

    fn infer_match(&mut self, ctx: &mut Context, s: &Term, m: &Match) -> TResult<(Term, Term)> {
        let (scrut, level, params) = self.infer_ind(ctx, &m.scrutinee, &m.ind)?;
        let n_ctors = self.reg().get(&m.ind).map_or(0, |d| d.ctors.len());
        if n_ctors != m.branches.len() {
            return Err(TypeError::new(
                "Fix",
                ctx,
                s,
                ErrorKind::Arity { what: "branches".into(), expected: n_ctors, found: m.branches.len() },
            ));
        }
        ctx.push(m.as_hint.clone(), Term::ind(&m.ind, level, params.clone()));
        let r = self.sort(ctx, &m.motive);
        ctx.pop();
        let (motive, _) = r?;
        let fix_ty =
            Term::Pi(m.as_hint.clone(), Arc::new(Term::ind(&m.ind, level, params.clone())), Arc::new(motive.clone()));
        let mut branches = Vec::with_capacity(m.branches.len());
        for (k, b) in m.branches.iter().enumerate() {
            let args = branch_arg_types(self.reg(), &m.ind, level, &params, k)
                .map_err(|e| TypeError::new("Fix", ctx, s, ErrorKind::Registry(e)))?;
            if args.len() != b.hints.len() {
                return Err(TypeError::new(
                    "Fix",
                    ctx,
                    s,
                    ErrorKind::Arity { what: "branch binders".into(), expected: args.len(), found: b.hints.len() },
                ));
            }
            let target = branch_target(&motive, &m.ind, level, &params, k, args.len());
            ctx.push(m.fix_hint.clone(), fix_ty.clone());
            for (h, (_, ty)) in b.hints.iter().zip(args.iter()) {
                ctx.push(h.clone(), ty.clone());
            }
            let r = self.check(ctx, &b.body, &target);
            for _ in 0..=args.len() {
                ctx.pop();
            }
            branches.push(Branch { hints: b.hints.clone(), body: r? });
        }
        let ty = motive.subst1(&scrut);
        let t = Term::Match(Arc::new(Match {
            ind: m.ind.clone(),
            scrutinee: scrut,
            as_hint: m.as_hint.clone(),
            motive,
            fix_hint: m.fix_hint.clone(),
            branches,
        }));
        Ok((t, ty))
    }

    fn infer_rect(&mut self, ctx: &mut Context, r: &VecRect) -> TResult<(Term, Term)> {
        let (scrut, l, a, n) = self.infer_vec(ctx, &r.scrutinee)?;
        let [mn, mv] = rect_motive_ctx(l, &a);
        ctx.push(r.motive_hints[0].clone(), mn);
        ctx.push(r.motive_hints[1].clone(), mv);
        let res = self.sort(ctx, &r.motive);
        ctx.pop();
        ctx.pop();
        let (motive, _) = res?;
        let shell = VecRect { scrutinee: scrut.clone(), motive: motive.clone(), ..r.clone() };
        let nil_case = self.check(ctx, &r.nil_case, &rect_nil_target(&shell, l, &a))?;
        for (h, ty) in r.cons_hints.iter().zip(rect_cons_ctx(&shell, l, &a)) {
            ctx.push(h.clone(), ty);
        }
        let res = self.check(ctx, &r.cons_case, &rect_cons_target(&shell, l, &a));
        for _ in 0..4 {
            ctx.pop();
        }
        let cons_case = res?;
        let ty = motive.instantiate(&[n, scrut.clone()]);
        Ok((Term::VecRect(Arc::new(VecRect { nil_case, cons_case, ..shell })), ty))
    }

    /// `Γ ⊢ s ◁ T ⇝ t`: a cast from the inferred type is always inserted.
    pub fn check(&mut self, ctx: &mut Context, s: &Term, ty: &Term) -> TResult<Term> {
        let (t, found) = self.infer(ctx, s)?;
        match consistent_with(self.env, &found, ty, &mut self.fuel) {
            TriState::Yes => Ok(Term::cast(found, ty.clone(), t)),
            TriState::No => {
                Err(TypeError::new("Check", ctx, s, ErrorKind::Inconsistent { expected: ty.clone(), found }))
            }
            TriState::Unknown => Err(TypeError::new("Check", ctx, s, ErrorKind::Fuel)),
        }
    }

    /// `▷□`, with the unknown type cast down one level.
    pub fn sort(&mut self, ctx: &mut Context, s: &Term) -> TResult<(Term, Level)> {
        let (t, ty) = self.infer(ctx, s)?;
        match self.whnf(ctx, "Univ-Inf", &ty)? {
            Term::Univ(i) => Ok((t, i)),
            w => match as_unk_univ(&w) {
                Some(j) if j >= 1 => Ok((Term::cast(ty, Term::Univ(j - 1), t), j - 1)),
                _ => Err(TypeError::new("Univ-Inf", ctx, s, ErrorKind::NotAType(w))),
            },
        }
    }

    /// `▷Π`, casting through the product germ when the type is unknown.
    pub fn infer_pi(&mut self, ctx: &mut Context, s: &Term) -> TResult<(Term, Term, Term)> {
        let (t, ty) = self.infer(ctx, s)?;
        match self.whnf(ctx, "Inf-Prod", &ty)? {
            Term::Pi(_, a, b) => Ok((t, (*a).clone(), (*b).clone())),
            w => match as_unk_univ(&w) {
                Some(i) => match self.env.variant.cast_of_pi(i) {
                    Some(c) => {
                        let g = germ(self.env, i, &Head::Pi);
                        Ok((Term::cast(ty, g, t), Term::unk_univ(c), Term::unk_univ(c)))
                    }
                    None => Err(TypeError::new("Inf-Prod?", ctx, s, ErrorKind::BelowZero(i))),
                },
                None => Err(TypeError::new(
                    "Inf-Prod",
                    ctx,
                    s,
                    ErrorKind::ExpectedHead { expected: "a product".into(), found: w },
                )),
            },
        }
    }

    /// `▷I`, casting to the germ of `I` when the type is unknown.
    pub fn infer_ind(&mut self, ctx: &mut Context, s: &Term, ind: &str) -> TResult<(Term, Level, Vec<Term>)> {
        let (t, ty) = self.infer(ctx, s)?;
        match self.whnf(ctx, "Inf-Ind", &ty)? {
            Term::Ind(i) if *i.name == *ind => Ok((t, i.level, i.params.clone())),
            w => match as_unk_univ(&w) {
                Some(i) => {
                    let g = germ(self.env, i, &Head::Ind(ind.into()));
                    let (level, params) = match &g {
                        Term::Ind(x) => (x.level, x.params.clone()),
                        _ => (i, vec![]),
                    };
                    Ok((Term::cast(ty, g, t), level, params))
                }
                None => Err(TypeError::new(
                    "Inf-Ind",
                    ctx,
                    s,
                    ErrorKind::ExpectedHead { expected: format!("the inductive `{ind}`"), found: w },
                )),
            },
        }
    }

    /// `▷vec`, casting to the vector germ when the type is unknown.
    pub fn infer_vec(&mut self, ctx: &mut Context, s: &Term) -> TResult<(Term, Level, Term, Term)> {
        let (t, ty) = self.infer(ctx, s)?;
        match self.whnf(ctx, "Inf-Vec", &ty)? {
            Term::Vec(l, a, n) => Ok((t, l, (*a).clone(), (*n).clone())),
            w => match as_unk_univ(&w) {
                Some(i) => {
                    let g = germ(self.env, i, &Head::Ind(VEC.into()));
                    Ok((Term::cast(ty, g, t), i, Term::unk_univ(i), Term::unknown(Term::nat())))
                }
                None => Err(TypeError::new(
                    "Inf-Vec",
                    ctx,
                    s,
                    ErrorKind::ExpectedHead { expected: "a vector".into(), found: w },
                )),
            },
        }
    }
}

/// Elaborates a closed source term with the default budget.
pub fn elaborate(env: &Env, s: &Term) -> TResult<(Term, Term)> {
    Elaborator::new(env, DEFAULT_FUEL).infer(&mut Context::new(), s)
}

/// Strips casts; undefined on `?`, `err` and the unknown-index vector forms.
pub fn erase(t: &Term) -> Option<Term> {
    match t {
        Term::Unknown(_) | Term::Err(_) | Term::SurfaceUnknown(_) => None,
        Term::Nil(n) if n.unk => None,
        Term::Cons(c) if c.unk => None,
        Term::Cast(_, _, u) => erase(u),
        _ => {
            let mut ok = true;
            let r = t.map_children(|_, c| match erase(c) {
                Some(e) => e,
                None => {
                    ok = false;
                    c.clone()
                }
            });
            ok.then_some(r)
        }
    }
}
