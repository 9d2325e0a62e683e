//! Bidirectional typing of cast-calculus terms: inference, checking against
//! a type up to conversion, and the constrained inferences that demand a
//! universe, a product, an inductive or a vector type.

use crate::convert::{conv_with, TriState};
use crate::env::Env;
use crate::print::show_in;
use crate::reduce::{whnf, Fuel, Outcome};
use crate::registry::{Registry, RegistryError};
use crate::syntax::{Context, Hint, Level, Match, Term, VecRect};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Unbound(usize),
    /// A type was required, the subject has the given type.
    NotAType(Term),
    /// Constrained inference found the wrong kind of type.
    ExpectedHead {
        expected: String,
        found: Term,
    },
    Mismatch {
        expected: Term,
        found: Term,
    },
    Inconsistent {
        expected: Term,
        found: Term,
    },
    LevelMismatch {
        expected: Level,
        found: Level,
    },
    /// The product germ is below level zero.
    BelowZero(Level),
    Arity {
        what: String,
        expected: usize,
        found: usize,
    },
    Registry(RegistryError),
    /// A construct that does not belong to the language being checked.
    Foreign(&'static str),
    Guard(String),
    Fuel,
}

/// Failure of a judgement: the rule being applied, the subterm it was
/// applied to (in its context) and the reason.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeError {
    pub rule: &'static str,
    pub subject: Term,
    pub names: Vec<String>,
    pub kind: ErrorKind,
}

impl TypeError {
    pub fn new(rule: &'static str, ctx: &Context, subject: &Term, kind: ErrorKind) -> Box<TypeError> {
        Box::new(TypeError {
            rule,
            subject: subject.clone(),
            names: ctx.names().iter().map(|n| n.to_string()).collect(),
            kind,
        })
    }

    pub fn render(&self, reg: Option<&Registry>) -> String {
        let show = |t: &Term| show_in(t, reg, &self.names);
        let reason = match &self.kind {
            ErrorKind::Unbound(k) => format!("unbound variable #{k}"),
            ErrorKind::NotAType(ty) => format!("expected a type, but it has type {}", show(ty)),
            ErrorKind::ExpectedHead { expected, found } => {
                format!("expected a term of {expected} type, but its type reduces to {}", show(found))
            }
            ErrorKind::Mismatch { expected, found } => {
                format!("type {} is not convertible to {}", show(found), show(expected))
            }
            ErrorKind::Inconsistent { expected, found } => {
                format!("type {} is not consistent with {}", show(found), show(expected))
            }
            ErrorKind::LevelMismatch { expected, found } => {
                format!("expected a type at level {expected}, found level {found}")
            }
            ErrorKind::BelowZero(i) => format!("no product germ at level {i} in this variant"),
            ErrorKind::Arity { what, expected, found } => format!("{what} expects {expected}, got {found}"),
            ErrorKind::Registry(e) => e.to_string(),
            ErrorKind::Foreign(what) => format!("{what} is not allowed here"),
            ErrorKind::Guard(msg) => msg.clone(),
            ErrorKind::Fuel => "reduction budget exhausted".into(),
        };
        format!("{}: {} (in `{}`)", self.rule, reason, show(&self.subject))
    }

    pub fn is_fuel(&self) -> bool {
        self.kind == ErrorKind::Fuel
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(None))
    }
}

impl std::error::Error for TypeError {}

pub type TResult<T> = Result<T, Box<TypeError>>;

/// Types of the arguments of constructor `k` inside a branch: the `m`-th is
/// scoped over the context, the recursive function and the first `m`
/// arguments.
pub fn branch_arg_types(
    reg: &Registry,
    ind: &str,
    level: Level,
    params: &[Term],
    k: usize,
) -> Result<Vec<(Hint, Term)>, RegistryError> {
    let lifted: Vec<Term> = params.iter().map(|p| p.lift(1, 0)).collect();
    Ok(reg
        .arg_telescope(ind, level, k)?
        .into_iter()
        .enumerate()
        .map(|(m, (h, ty))| (h, ty.subst(m, &lifted)))
        .collect())
}

/// The motive instantiated at constructor `k` applied to the branch
/// variables, in the branch context.
pub fn branch_target(motive: &Term, ind: &str, level: Level, params: &[Term], k: usize, arity: usize) -> Term {
    let ps = params.iter().map(|p| p.lift(1 + arity, 0)).collect();
    let args = (0..arity).rev().map(Term::Var).collect();
    motive.lift(1 + arity, 1).subst1(&Term::ctor(ind, k, level, ps, args))
}

/// Type of the recursive function bound in every branch.
pub fn fix_type(m: &Match, level: Level, params: &[Term]) -> Term {
    Term::Pi(
        m.as_hint.clone(),
        std::sync::Arc::new(Term::ind(&m.ind, level, params.to_vec())),
        std::sync::Arc::new(m.motive.clone()),
    )
}

/// Context extension for the vector recursor's motive.
pub fn rect_motive_ctx(level: Level, elem: &Term) -> [Term; 2] {
    [Term::nat(), Term::vec_ty(level, elem.lift(1, 0), Term::Var(0))]
}

/// Context extension for the cons case: head, length, tail and recursive result.
pub fn rect_cons_ctx(r: &VecRect, level: Level, elem: &Term) -> [Term; 4] {
    [
        elem.clone(),
        Term::nat(),
        Term::vec_ty(level, elem.lift(2, 0), Term::Var(0)),
        r.motive.lift(3, 2).instantiate(&[Term::Var(1), Term::Var(0)]),
    ]
}

pub fn rect_nil_target(r: &VecRect, level: Level, elem: &Term) -> Term {
    r.motive.instantiate(&[Term::zero(), Term::nil(false, level, elem.clone())])
}

pub fn rect_cons_target(r: &VecRect, level: Level, elem: &Term) -> Term {
    let v = Term::cons(false, level, elem.lift(4, 0), Term::Var(3), Term::Var(2), Term::Var(1));
    r.motive.lift(4, 2).instantiate(&[Term::succ(Term::Var(2)), v])
}

/// The typing judgements, sharing one reduction budget.
pub struct Typer<'a> {
    pub env: &'a Env,
    pub fuel: Fuel,
}

impl<'a> Typer<'a> {
    pub fn new(env: &'a Env, fuel: u64) -> Typer<'a> {
        Typer { env, fuel: Fuel::new(fuel) }
    }

    fn reg(&self) -> &'a Registry {
        &self.env.registry
    }

    pub fn whnf(&mut self, ctx: &Context, rule: &'static str, t: &Term) -> TResult<Term> {
        match whnf(self.env, t, &mut self.fuel) {
            Outcome::Value(v, _) => Ok(v),
            Outcome::FuelExhausted(_) => Err(TypeError::new(rule, ctx, t, ErrorKind::Fuel)),
        }
    }

    pub fn infer(&mut self, ctx: &mut Context, t: &Term) -> TResult<Term> {
        macro_rules! fail {
            ($rule:expr, $kind:expr $(,)?) => {
                Err(TypeError::new($rule, ctx, t, $kind))
            };
        }
        match t {
            Term::Var(k) => match ctx.lookup(*k) {
                Some(ty) => Ok(ty),
                None => fail!("Var", ErrorKind::Unbound(*k)),
            },
            Term::Univ(i) => Ok(Term::Univ(i + 1)),
            Term::Pi(h, a, b) => {
                let i = self.sort(ctx, a)?;
                ctx.push(h.clone(), (**a).clone());
                let j = self.sort(ctx, b);
                ctx.pop();
                Ok(Term::Univ(self.env.variant.sort_of_pi(i, j?)))
            }
            Term::Lam(h, a, body) => {
                self.sort(ctx, a)?;
                ctx.push(h.clone(), (**a).clone());
                let b = self.infer(ctx, body);
                ctx.pop();
                Ok(Term::Pi(h.clone(), a.clone(), std::sync::Arc::new(b?)))
            }
            Term::App(f, u) => {
                let (a, b) = self.infer_pi(ctx, f)?;
                self.check(ctx, u, &a)?;
                Ok(b.subst1(u))
            }
            Term::Ind(i) => {
                self.check_params(ctx, t, &i.name, i.level, &i.params)?;
                Ok(Term::Univ(i.level))
            }
            Term::Ctor(c) => {
                self.check_params(ctx, t, &c.ind, c.level, &c.params)?;
                let decl = match self.reg().ctor_decl(&c.ind, c.idx) {
                    Some(d) => d,
                    None => return fail!("Cons", ErrorKind::Registry(RegistryError::Unknown(c.ind.to_string()))),
                };
                if decl.args.len() != c.args.len() {
                    return fail!(
                        "Cons",
                        ErrorKind::Arity {
                            what: format!("`{}`", decl.name),
                            expected: decl.args.len(),
                            found: c.args.len()
                        },
                    );
                }
                for m in 0..c.args.len() {
                    let tys = self
                        .reg()
                        .instantiate_args(&c.ind, c.level, c.idx, &c.params, &c.args[..m])
                        .map_err(|e| TypeError::new("Cons", ctx, t, ErrorKind::Registry(e)))?;
                    self.check(ctx, &c.args[m], &tys[m])?;
                }
                Ok(Term::ind(&c.ind, c.level, c.params.clone()))
            }
            Term::Match(m) => self.infer_match(ctx, t, m),
            Term::Unknown(a) | Term::Err(a) => {
                self.sort(ctx, a)?;
                Ok((**a).clone())
            }
            Term::Cast(a, b, u) => {
                self.sort(ctx, a)?;
                self.sort(ctx, b)?;
                self.check(ctx, u, a)?;
                Ok((**b).clone())
            }
            Term::SurfaceUnknown(_) => fail!("Unk", ErrorKind::Foreign("the surface unknown `?@i`")),
            Term::Vec(l, a, n) => {
                self.check(ctx, a, &Term::Univ(*l))?;
                self.check(ctx, n, &Term::nat())?;
                Ok(Term::Univ(*l))
            }
            Term::Nil(nl) => {
                self.check(ctx, &nl.elem, &Term::Univ(nl.level))?;
                let len = if nl.unk { Term::unknown(Term::nat()) } else { Term::zero() };
                Ok(Term::vec_ty(nl.level, nl.elem.clone(), len))
            }
            Term::Cons(c) => {
                self.check(ctx, &c.elem, &Term::Univ(c.level))?;
                self.check(ctx, &c.head, &c.elem)?;
                self.check(ctx, &c.len, &Term::nat())?;
                self.check(ctx, &c.tail, &Term::vec_ty(c.level, c.elem.clone(), c.len.clone()))?;
                let len = if c.unk { Term::unknown(Term::nat()) } else { Term::succ(c.len.clone()) };
                Ok(Term::vec_ty(c.level, c.elem.clone(), len))
            }
            Term::VecRect(r) => {
                let (l, a, n) = self.infer_vec(ctx, &r.scrutinee)?;
                let [mn, mv] = rect_motive_ctx(l, &a);
                ctx.push(r.motive_hints[0].clone(), mn);
                ctx.push(r.motive_hints[1].clone(), mv);
                let s = self.sort(ctx, &r.motive);
                ctx.pop();
                ctx.pop();
                s?;
                self.check(ctx, &r.nil_case, &rect_nil_target(r, l, &a))?;
                let tys = rect_cons_ctx(r, l, &a);
                for (h, ty) in r.cons_hints.iter().zip(tys) {
                    ctx.push(h.clone(), ty);
                }
                let res = self.check(ctx, &r.cons_case, &rect_cons_target(r, l, &a));
                for _ in 0..4 {
                    ctx.pop();
                }
                res?;
                Ok(r.motive.instantiate(&[n, r.scrutinee.clone()]))
            }
        }
    }

    fn check_params(&mut self, ctx: &mut Context, t: &Term, ind: &str, level: Level, params: &[Term]) -> TResult<()> {
        let decl = match self.reg().get(ind) {
            Some(d) => d,
            None => return Err(TypeError::new("Ind", ctx, t, ErrorKind::Registry(RegistryError::Unknown(ind.into())))),
        };
        if decl.params.len() != params.len() {
            return Err(TypeError::new(
                "Ind",
                ctx,
                t,
                ErrorKind::Arity { what: format!("`{ind}`"), expected: decl.params.len(), found: params.len() },
            ));
        }
        for k in 0..params.len() {
            let tys = self
                .reg()
                .instantiate_params(ind, level, &params[..k])
                .map_err(|e| TypeError::new("Ind", ctx, t, ErrorKind::Registry(e)))?;
            self.check(ctx, &params[k], &tys[k])?;
        }
        Ok(())
    }

    fn infer_match(&mut self, ctx: &mut Context, t: &Term, m: &Match) -> TResult<Term> {
        let (level, params) = self.infer_ind(ctx, &m.scrutinee, &m.ind)?;
        let decl = self.reg().get(&m.ind).expect("checked by infer_ind");
        if decl.ctors.len() != m.branches.len() {
            return Err(TypeError::new(
                "Fix",
                ctx,
                t,
                ErrorKind::Arity { what: "branches".into(), expected: decl.ctors.len(), found: m.branches.len() },
            ));
        }
        ctx.push(m.as_hint.clone(), Term::ind(&m.ind, level, params.clone()));
        let s = self.sort(ctx, &m.motive);
        ctx.pop();
        s?;
        let fix_ty = fix_type(m, level, &params);
        for (k, b) in m.branches.iter().enumerate() {
            let args = branch_arg_types(self.reg(), &m.ind, level, &params, k)
                .map_err(|e| TypeError::new("Fix", ctx, t, ErrorKind::Registry(e)))?;
            if args.len() != b.hints.len() {
                return Err(TypeError::new(
                    "Fix",
                    ctx,
                    t,
                    ErrorKind::Arity { what: "branch binders".into(), expected: args.len(), found: b.hints.len() },
                ));
            }
            let target = branch_target(&m.motive, &m.ind, level, &params, k, args.len());
            ctx.push(m.fix_hint.clone(), fix_ty.clone());
            for (h, (_, ty)) in b.hints.iter().zip(args.iter()) {
                ctx.push(h.clone(), ty.clone());
            }
            let r = self.check(ctx, &b.body, &target);
            for _ in 0..=args.len() {
                ctx.pop();
            }
            r?;
        }
        Ok(m.motive.subst1(&m.scrutinee))
    }

    pub fn check(&mut self, ctx: &mut Context, t: &Term, ty: &Term) -> TResult<()> {
        let found = self.infer(ctx, t)?;
        match conv_with(self.env, &found, ty, &mut self.fuel) {
            TriState::Yes => Ok(()),
            TriState::No => Err(TypeError::new("Check", ctx, t, ErrorKind::Mismatch { expected: ty.clone(), found })),
            TriState::Unknown => Err(TypeError::new("Check", ctx, t, ErrorKind::Fuel)),
        }
    }

    /// `t ▷□ i`
    pub fn sort(&mut self, ctx: &mut Context, t: &Term) -> TResult<Level> {
        let ty = self.infer(ctx, t)?;
        match self.whnf(ctx, "Univ-Inf", &ty)? {
            Term::Univ(i) => Ok(i),
            found => Err(TypeError::new("Univ-Inf", ctx, t, ErrorKind::NotAType(found))),
        }
    }

    /// `t ▷Π Πx:A.B`
    pub fn infer_pi(&mut self, ctx: &mut Context, t: &Term) -> TResult<(Term, Term)> {
        let ty = self.infer(ctx, t)?;
        match self.whnf(ctx, "Prod-Inf", &ty)? {
            Term::Pi(_, a, b) => Ok(((*a).clone(), (*b).clone())),
            found => {
                Err(TypeError::new("Prod-Inf", ctx, t, ErrorKind::ExpectedHead { expected: "a product".into(), found }))
            }
        }
    }

    /// `t ▷I I⟨i⟩(a)`
    pub fn infer_ind(&mut self, ctx: &mut Context, t: &Term, ind: &str) -> TResult<(Level, Vec<Term>)> {
        let ty = self.infer(ctx, t)?;
        match self.whnf(ctx, "Ind-Inf", &ty)? {
            Term::Ind(i) if *i.name == *ind => Ok((i.level, i.params.clone())),
            found => Err(TypeError::new(
                "Ind-Inf",
                ctx,
                t,
                ErrorKind::ExpectedHead { expected: format!("the inductive `{ind}`"), found },
            )),
        }
    }

    /// `t ▷vec vec@i A n`
    pub fn infer_vec(&mut self, ctx: &mut Context, t: &Term) -> TResult<(Level, Term, Term)> {
        let ty = self.infer(ctx, t)?;
        match self.whnf(ctx, "Vec-Inf", &ty)? {
            Term::Vec(l, a, n) => Ok((l, (*a).clone(), (*n).clone())),
            found => {
                Err(TypeError::new("Vec-Inf", ctx, t, ErrorKind::ExpectedHead { expected: "a vector".into(), found }))
            }
        }
    }

    /// Checks that every declaration is a type under its prefix.
    pub fn check_context(&mut self, ctx: &Context) -> TResult<()> {
        let mut prefix = Context::new();
        for d in &ctx.decls {
            self.sort(&mut prefix, &d.ty)?;
            prefix.push(d.hint.clone(), d.ty.clone());
        }
        Ok(())
    }
}

/// Type of a closed term with the default budget.
pub fn infer_closed(env: &Env, t: &Term) -> TResult<Term> {
    Typer::new(env, crate::reduce::DEFAULT_FUEL).infer(&mut Context::new(), t)
}

pub fn check_closed(env: &Env, t: &Term, ty: &Term) -> TResult<()> {
    Typer::new(env, crate::reduce::DEFAULT_FUEL).check(&mut Context::new(), t, ty)
}
