//! Discrete model. Cast-calculus terms are translated into a small untyped
//! target language whose lazy evaluator realises universe codes, inductives
//! extended with `?`/`err` constructors, the unknown type as tagged pairs,
//! and the cast function by case analysis on codes. Used as an independent
//! oracle for the reduction engine.

use crate::env::{germ, head_of, Env, Head};
use crate::reduce::{whnf, Fuel, Outcome};
use crate::syntax::{Level, Name, Term};
use crate::typing::infer_closed;
use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;
use thiserror::Error;

/// Target language of the translation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MTerm {
    Var(usize),
    /// Code of a universe.
    UnivCode(Level),
    /// Code of a product; the codomain binds the argument.
    PiCode(Rc<MTerm>, Rc<MTerm>),
    Lam(Rc<MTerm>),
    App(Rc<MTerm>, Rc<MTerm>),
    IndCode(Name, Level, Vec<Rc<MTerm>>),
    Ctor(Name, usize, Level, Vec<Rc<MTerm>>, Vec<Rc<MTerm>>),
    Elim(Rc<Elim>),
    /// `?` (when set) or `err` at a code.
    Exc(bool, Rc<MTerm>),
    /// `cast A B t`
    Cast(Rc<MTerm>, Rc<MTerm>, Rc<MTerm>),
}

/// Recursive eliminator with the two extra branches for the exceptional
/// constructors. Branches bind the recursive function then the arguments;
/// the exceptional branches bind the scrutinee.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elim {
    pub ind: Name,
    pub scrutinee: Rc<MTerm>,
    pub branches: Vec<Rc<MTerm>>,
    pub unk_case: Rc<MTerm>,
    pub err_case: Rc<MTerm>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("fuel exhausted")]
    Fuel,
    /// A value of the wrong shape reached an eliminator or a cast.
    #[error("dynamic tag error: {0}")]
    Tag(String),
    #[error("not covered by the model: {0}")]
    Unsupported(String),
}

pub type MResult<T> = Result<T, ModelError>;

fn tag<T>(msg: impl Into<String>) -> MResult<T> {
    Err(ModelError::Tag(msg.into()))
}

/// Compositional translation.
pub fn translate(t: &Term) -> MResult<MTerm> {
    let r = |t: &Term| translate(t).map(Rc::new);
    let rs = |ts: &[Term]| ts.iter().map(r).collect::<MResult<Vec<_>>>();
    Ok(match t {
        Term::Var(k) => MTerm::Var(*k),
        Term::Univ(i) => MTerm::UnivCode(*i),
        Term::Pi(_, a, b) => MTerm::PiCode(r(a)?, r(b)?),
        Term::Lam(_, _, b) => MTerm::Lam(r(b)?),
        Term::App(f, u) => MTerm::App(r(f)?, r(u)?),
        Term::Ind(i) => MTerm::IndCode(i.name.clone(), i.level, rs(&i.params)?),
        Term::Ctor(c) => MTerm::Ctor(c.ind.clone(), c.idx, c.level, rs(&c.params)?, rs(&c.args)?),
        Term::Match(m) => {
            let motive = r(&m.motive)?;
            MTerm::Elim(Rc::new(Elim {
                ind: m.ind.clone(),
                scrutinee: r(&m.scrutinee)?,
                branches: m.branches.iter().map(|b| r(&b.body)).collect::<MResult<_>>()?,
                unk_case: Rc::new(MTerm::Exc(true, motive.clone())),
                err_case: Rc::new(MTerm::Exc(false, motive)),
            }))
        }
        Term::Unknown(a) => MTerm::Exc(true, r(a)?),
        Term::Err(a) => MTerm::Exc(false, r(a)?),
        Term::Cast(a, b, u) => MTerm::Cast(r(a)?, r(b)?, r(u)?),
        Term::SurfaceUnknown(_) => return Err(ModelError::Unsupported("the surface unknown".into())),
        Term::Vec(..) | Term::Nil(_) | Term::Cons(_) | Term::VecRect(_) => {
            return Err(ModelError::Unsupported("vectors".into()))
        }
    })
}

/// Values. Codes (`Univ`, `Pi`, `Ind`, `UnkU`, `ErrU`) are the elements of
/// the decoding of a universe.
#[derive(Clone)]
pub enum Value {
    Univ(Level),
    Pi(Thunk, Rc<Fun>),
    Ind(Name, Level, Vec<Thunk>),
    UnkU(Level),
    ErrU(Level),
    Fun(Rc<Fun>),
    Ctor(Name, usize, Level, Vec<Thunk>, Vec<Thunk>),
    /// Exceptional constructor (`?` when set) of the inductive decoding the
    /// code, which is an `Ind` or an `UnkU`.
    Exc(bool, Rc<Value>),
    /// Element of the unknown type: a head and a value of its germ.
    Pair(Head, Thunk),
    /// Sole inhabitant of the error type.
    Unit,
}

pub enum Fun {
    Closure(Scope, Rc<MTerm>),
    /// The recursive function bound in the branches of an eliminator.
    Fix(Scope, Rc<Elim>),
    /// `λx. exc (B x)`
    Exc(bool, Rc<Fun>),
    /// `λb. let a := cast B₁ A₁ b in cast (A₂ a) (B₂ b) (f a)`
    Cast {
        src_dom: Thunk,
        src_cod: Rc<Fun>,
        tgt_dom: Thunk,
        tgt_cod: Rc<Fun>,
        f: Thunk,
    },
}

type Suspended = Box<dyn FnOnce(&mut Model<'_>) -> MResult<Value>>;

enum ThunkState {
    Delayed(Scope, Rc<MTerm>),
    Lazy(Suspended),
    Forced(Value),
    Forcing,
}

#[derive(Clone)]
pub struct Thunk(Rc<RefCell<ThunkState>>);

impl Thunk {
    pub fn value(v: Value) -> Thunk {
        Thunk(Rc::new(RefCell::new(ThunkState::Forced(v))))
    }
    fn delayed(s: &Scope, t: &Rc<MTerm>) -> Thunk {
        Thunk(Rc::new(RefCell::new(ThunkState::Delayed(s.clone(), t.clone()))))
    }
    fn lazy(f: impl FnOnce(&mut Model<'_>) -> MResult<Value> + 'static) -> Thunk {
        Thunk(Rc::new(RefCell::new(ThunkState::Lazy(Box::new(f)))))
    }
}

/// Evaluation environment, innermost binding first.
#[derive(Clone, Default)]
pub struct Scope(Option<Rc<(Thunk, Scope)>>);

impl Scope {
    pub fn push(&self, t: Thunk) -> Scope {
        Scope(Some(Rc::new((t, self.clone()))))
    }
    fn get(&self, k: usize) -> MResult<Thunk> {
        let mut s = self;
        for _ in 0..k {
            s = match &s.0 {
                Some(n) => &n.1,
                None => return tag("unbound variable"),
            };
        }
        match &s.0 {
            Some(n) => Ok(n.0.clone()),
            None => tag("unbound variable"),
        }
    }
}

/// The evaluator, with its fuel.
pub struct Model<'a> {
    pub env: &'a Env,
    pub fuel: Fuel,
    germs: HashMap<(Level, Head), Value>,
}

impl<'a> Model<'a> {
    pub fn new(env: &'a Env, fuel: u64) -> Model<'a> {
        Model { env, fuel: Fuel::new(fuel), germs: HashMap::new() }
    }

    fn tick(&mut self) -> MResult<()> {
        if self.fuel.take() {
            Ok(())
        } else {
            Err(ModelError::Fuel)
        }
    }

    pub fn force(&mut self, t: &Thunk) -> MResult<Value> {
        let state = std::mem::replace(&mut *t.0.borrow_mut(), ThunkState::Forcing);
        let r = match state {
            ThunkState::Forced(v) => Ok(v),
            ThunkState::Delayed(s, m) => self.eval(&s, &m),
            ThunkState::Lazy(f) => f(self),
            ThunkState::Forcing => tag("thunk forced re-entrantly"),
        };
        match &r {
            Ok(v) => *t.0.borrow_mut() = ThunkState::Forced(v.clone()),
            Err(_) => {
                // leave the thunk unusable; the evaluation is aborted anyway
            }
        }
        r
    }

    pub fn eval(&mut self, s: &Scope, t: &Rc<MTerm>) -> MResult<Value> {
        self.tick()?;
        match &**t {
            MTerm::Var(k) => {
                let th = s.get(*k)?;
                self.force(&th)
            }
            MTerm::UnivCode(i) => Ok(Value::Univ(*i)),
            MTerm::PiCode(a, b) => Ok(Value::Pi(Thunk::delayed(s, a), Rc::new(Fun::Closure(s.clone(), b.clone())))),
            MTerm::Lam(b) => Ok(Value::Fun(Rc::new(Fun::Closure(s.clone(), b.clone())))),
            MTerm::App(f, u) => {
                let f = self.eval(s, f)?;
                self.apply_value(f, Thunk::delayed(s, u))
            }
            MTerm::IndCode(n, l, ps) => {
                Ok(Value::Ind(n.clone(), *l, ps.iter().map(|p| Thunk::delayed(s, p)).collect()))
            }
            MTerm::Ctor(n, k, l, ps, args) => Ok(Value::Ctor(
                n.clone(),
                *k,
                *l,
                ps.iter().map(|p| Thunk::delayed(s, p)).collect(),
                args.iter().map(|a| Thunk::delayed(s, a)).collect(),
            )),
            MTerm::Elim(e) => self.elim(s, e, Thunk::delayed(s, &e.scrutinee)),
            MTerm::Exc(unk, a) => {
                let code = self.eval(s, a)?;
                self.exception(&code, *unk)
            }
            MTerm::Cast(a, b, u) => {
                let a = self.eval(s, a)?;
                let b = self.eval(s, b)?;
                self.cast(a, b, Thunk::delayed(s, u))
            }
        }
    }

    fn elim(&mut self, s: &Scope, e: &Rc<Elim>, scrut: Thunk) -> MResult<Value> {
        match self.force(&scrut)? {
            Value::Ctor(n, k, _, _, args) if n == e.ind => {
                let Some(body) = e.branches.get(k) else { return tag("constructor index out of range") };
                let fix = Value::Fun(Rc::new(Fun::Fix(s.clone(), e.clone())));
                let mut inner = s.push(Thunk::value(fix));
                for a in args {
                    inner = inner.push(a);
                }
                self.eval(&inner, body)
            }
            Value::Exc(unk, code) if matches!(&*code, Value::Ind(n, ..) if *n == e.ind) => {
                let case = if unk { &e.unk_case } else { &e.err_case };
                self.eval(&s.push(scrut), case)
            }
            _ => tag(format!("eliminator for `{}` applied to a value of another type", e.ind)),
        }
    }

    pub fn apply_value(&mut self, f: Value, arg: Thunk) -> MResult<Value> {
        match f {
            Value::Fun(f) => self.apply(&f, arg),
            _ => tag("application of a non-function"),
        }
    }

    pub fn apply(&mut self, f: &Rc<Fun>, arg: Thunk) -> MResult<Value> {
        self.tick()?;
        match &**f {
            Fun::Closure(s, body) => self.eval(&s.push(arg), body),
            Fun::Fix(s, e) => self.elim(s, e, arg),
            Fun::Exc(unk, cod) => {
                let code = self.apply(cod, arg)?;
                self.exception(&code, *unk)
            }
            Fun::Cast { src_dom, src_cod, tgt_dom, tgt_cod, f } => {
                let (sd, td, b) = (src_dom.clone(), tgt_dom.clone(), arg.clone());
                let a = Thunk::lazy(move |m| {
                    let td = m.force(&td)?;
                    let sd = m.force(&sd)?;
                    m.cast(td, sd, b)
                });
                let src = self.apply(src_cod, a.clone())?;
                let tgt = self.apply(tgt_cod, arg)?;
                let (f, a2) = (f.clone(), a);
                let fa = Thunk::lazy(move |m| {
                    let f = m.force(&f)?;
                    m.apply_value(f, a2)
                });
                self.cast(src, tgt, fa)
            }
        }
    }

    /// `?` or `err` at a code.
    pub fn exception(&mut self, code: &Value, unk: bool) -> MResult<Value> {
        match code {
            Value::Pi(_, cod) => Ok(Value::Fun(Rc::new(Fun::Exc(unk, cod.clone())))),
            Value::Univ(j) => Ok(if unk { Value::UnkU(*j) } else { Value::ErrU(*j) }),
            Value::Ind(..) | Value::UnkU(_) => Ok(Value::Exc(unk, Rc::new(code.clone()))),
            Value::ErrU(_) => Ok(Value::Unit),
            _ => tag("exception at a value that is not a code"),
        }
    }

    /// Code of the germ of `h` at level `i`, as given by the reduction engine's
    /// germ function and evaluated here.
    fn germ_code(&mut self, i: Level, h: &Head) -> MResult<Value> {
        if let Some(v) = self.germs.get(&(i, h.clone())) {
            return Ok(v.clone());
        }
        let t = Rc::new(translate(&germ(self.env, i, h))?);
        let v = self.eval(&Scope::default(), &t)?;
        self.germs.insert((i, h.clone()), v.clone());
        Ok(v)
    }

    /// `cast A B v`, by case analysis on the source code, then the target.
    pub fn cast(&mut self, a: Value, b: Value, v: Thunk) -> MResult<Value> {
        self.tick()?;
        match &a {
            Value::Pi(ad, ac) => match &b {
                Value::Pi(bd, bc) => Ok(Value::Fun(Rc::new(Fun::Cast {
                    src_dom: ad.clone(),
                    src_cod: ac.clone(),
                    tgt_dom: bd.clone(),
                    tgt_cod: bc.clone(),
                    f: v,
                }))),
                Value::UnkU(i) => self.cast_to_unknown(a.clone(), *i, Head::Pi, v),
                _ => self.exception(&b, false),
            },
            Value::Ind(n, ..) => match &b {
                Value::Ind(n2, ..) if n == n2 => self.cast_ind(&a, &b, v),
                Value::UnkU(i) => self.cast_to_unknown(a.clone(), *i, Head::Ind(n.clone()), v),
                _ => self.exception(&b, false),
            },
            Value::Univ(j) => match &b {
                Value::Univ(j2) if j == j2 => self.force(&v),
                Value::UnkU(i) if j < i => Ok(Value::Pair(Head::Univ(*j), v)),
                _ => self.exception(&b, false),
            },
            Value::UnkU(i) => match self.force(&v)? {
                Value::Pair(h, x) => {
                    let g = self.germ_code(*i, &h)?;
                    self.cast(g, b, x)
                }
                Value::Exc(unk, _) => self.exception(&b, unk),
                _ => tag("value of the unknown type that is not a pair"),
            },
            Value::ErrU(_) => self.exception(&b, false),
            _ => tag("cast from a value that is not a code"),
        }
    }

    /// `cast A ?ᵢ v := (h ; cast A germᵢ(h) v)` unless the germ is the error type.
    fn cast_to_unknown(&mut self, a: Value, i: Level, h: Head, v: Thunk) -> MResult<Value> {
        let g = self.germ_code(i, &h)?;
        if matches!(g, Value::ErrU(_)) {
            return self.exception(&Value::UnkU(i), false);
        }
        Ok(Value::Pair(h, Thunk::lazy(move |m| m.cast(a, g, v))))
    }

    /// Cast between two instances of one inductive. Without parameters it is
    /// the identity; otherwise constructor arguments are cast one by one.
    fn cast_ind(&mut self, a: &Value, b: &Value, v: Thunk) -> MResult<Value> {
        let (Value::Ind(n, la, pa), Value::Ind(_, lb, pb)) = (a, b) else { unreachable!("checked by the caller") };
        if pa.is_empty() && pb.is_empty() {
            return self.force(&v);
        }
        match self.force(&v)? {
            Value::Ctor(cn, k, _, _, args) if cn == *n => {
                let reg = self.env.registry.clone();
                let (Ok(ta), Ok(tb)) = (reg.arg_telescope(n, *la, k), reg.arg_telescope(n, *lb, k)) else {
                    return tag("unknown constructor");
                };
                let scope_of = |ps: &[Thunk]| ps.iter().fold(Scope::default(), |s, p| s.push(p.clone()));
                let (mut sa, mut sb) = (scope_of(pa), scope_of(pb));
                let mut out = Vec::with_capacity(args.len());
                for (m, x) in args.into_iter().enumerate() {
                    let from = self.eval(&sa, &Rc::new(translate(&ta[m].1)?))?;
                    let to = self.eval(&sb, &Rc::new(translate(&tb[m].1)?))?;
                    let y = Thunk::lazy({
                        let x = x.clone();
                        move |md| md.cast(from, to, x)
                    });
                    sa = sa.push(x);
                    sb = sb.push(y.clone());
                    out.push(y);
                }
                Ok(Value::Ctor(cn, k, *lb, pb.clone(), out))
            }
            Value::Exc(unk, _) => self.exception(b, unk),
            _ => tag(format!("cast between instances of `{n}` applied to a non-constructor")),
        }
    }

    /// Evaluates a closed cast-calculus term.
    pub fn run(&mut self, t: &Term) -> MResult<Value> {
        let m = Rc::new(translate(t)?);
        self.eval(&Scope::default(), &m)
    }

    /// Prints a value, forcing constructor arguments up to `depth`.
    pub fn show(&mut self, v: &Value, depth: usize) -> String {
        let reg = self.env.registry.clone();
        match v {
            Value::Univ(i) => format!("Type@{i}"),
            Value::UnkU(i) => format!("?[Type@{i}]"),
            Value::ErrU(i) => format!("err[Type@{i}]"),
            Value::Pi(..) => "<product code>".into(),
            Value::Ind(n, l, _) => {
                if *l == 0 {
                    n.to_string()
                } else {
                    format!("{n}@{l}")
                }
            }
            Value::Fun(_) => "<function>".into(),
            Value::Unit => "()".into(),
            Value::Exc(unk, code) => {
                let c = self.show(code, 0);
                if *unk {
                    format!("?[{c}]")
                } else {
                    format!("err[{c}]")
                }
            }
            Value::Pair(h, x) => {
                if depth == 0 {
                    return format!("({h}; ..)");
                }
                let inner = self.force(x).map(|x| self.show(&x, depth - 1)).unwrap_or_else(|e| format!("<{e}>"));
                format!("({h}; {inner})")
            }
            Value::Ctor(n, k, _, _, args) => {
                if let Some(num) = self.numeral(v) {
                    return num.to_string();
                }
                let name = reg.ctor_decl(n, *k).map(|d| d.name.to_string()).unwrap_or_else(|| format!("{n}#{k}"));
                if args.is_empty() {
                    return name;
                }
                if depth == 0 {
                    return format!("({name} ..)");
                }
                let parts: Vec<String> = args
                    .iter()
                    .map(|a| self.force(a).map(|x| self.show(&x, depth - 1)).unwrap_or_else(|e| format!("<{e}>")))
                    .collect();
                format!("({name} {})", parts.join(" "))
            }
        }
    }

    fn numeral(&mut self, v: &Value) -> Option<u64> {
        let mut n = 0;
        let mut cur = v.clone();
        loop {
            match &cur {
                Value::Ctor(ind, 0, ..) if **ind == *crate::syntax::NAT => return Some(n),
                Value::Ctor(ind, 1, _, _, args) if **ind == *crate::syntax::NAT => {
                    cur = self.force(&args[0]).ok()?;
                    n += 1;
                }
                _ => return None,
            }
        }
    }
}

/// What the comparison between the two evaluators found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Agree,
    Disagree(String),
    OperationalDiverges,
    ModelDiverges,
    BothDiverge,
    /// The term is not of an inductive type or a universe.
    NotObservable,
    Unsupported(String),
    IllTyped(String),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Agree => f.write_str("agree"),
            Verdict::Disagree(m) => write!(f, "DISAGREE: {m}"),
            Verdict::OperationalDiverges => f.write_str("operational side out of fuel"),
            Verdict::ModelDiverges => f.write_str("model out of fuel"),
            Verdict::BothDiverge => f.write_str("both out of fuel"),
            Verdict::NotObservable => f.write_str("not observable"),
            Verdict::Unsupported(m) => write!(f, "unsupported: {m}"),
            Verdict::IllTyped(m) => write!(f, "ill typed: {m}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct OracleReport {
    pub operational: Option<Term>,
    pub model: Option<String>,
    pub verdict: Verdict,
}

/// Evaluates a closed term of inductive or universe type both by weak-head
/// reduction and in the model, and compares the results, descending into
/// constructor arguments and type codes.
pub fn oracle_compare(env: &Env, t: &Term, fuel: u64) -> OracleReport {
    let mut report = OracleReport { operational: None, model: None, verdict: Verdict::NotObservable };
    let ty = match infer_closed(env, t) {
        Ok(ty) => ty,
        Err(e) => {
            report.verdict = Verdict::IllTyped(e.render(Some(&env.registry)));
            return report;
        }
    };
    let mut f = Fuel::new(fuel);
    match whnf(env, &ty, &mut f) {
        Outcome::Value(Term::Ind(_) | Term::Univ(_), _) => {}
        Outcome::Value(Term::Unknown(u), _) if matches!(*u, Term::Univ(_)) => {}
        _ => return report,
    }
    let mut model = Model::new(env, fuel);
    let mv = model.run(t);
    let mut f = Fuel::new(fuel);
    let op = whnf(env, t, &mut f);
    report.operational = op.clone().value();
    if let Ok(v) = &mv {
        report.model = Some(model.show(v, 64));
    }
    report.verdict = match (op, mv) {
        (_, Err(ModelError::Unsupported(m))) => Verdict::Unsupported(m),
        (_, Err(ModelError::Tag(m))) => Verdict::Disagree(format!("model tag error: {m}")),
        (Outcome::FuelExhausted(_), Err(ModelError::Fuel)) => Verdict::BothDiverge,
        (Outcome::FuelExhausted(_), Ok(_)) => Verdict::OperationalDiverges,
        (Outcome::Value(..), Err(ModelError::Fuel)) => Verdict::ModelDiverges,
        (Outcome::Value(o, _), Ok(v)) => {
            let mut cmp = Compare { env, fuel: Fuel::new(fuel), model: &mut model };
            match cmp.agree(&o, &v, 0) {
                Ok(true) => Verdict::Agree,
                Ok(false) => Verdict::Disagree(format!(
                    "operational {} vs model {}",
                    crate::print::show(&o, Some(&env.registry)),
                    report.model.clone().unwrap_or_default()
                )),
                Err(ModelError::Fuel) => Verdict::BothDiverge,
                Err(e) => Verdict::Disagree(e.to_string()),
            }
        }
    };
    report
}

/// Depth up to which constructor arguments are compared.
const COMPARE_DEPTH: usize = 4096;

struct Compare<'m, 'a> {
    env: &'a Env,
    fuel: Fuel,
    model: &'m mut Model<'a>,
}

impl Compare<'_, '_> {
    fn whnf(&mut self, t: &Term) -> MResult<Term> {
        match whnf(self.env, t, &mut self.fuel) {
            Outcome::Value(v, _) => Ok(v),
            Outcome::FuelExhausted(_) => Err(ModelError::Fuel),
        }
    }

    /// `op` is in weak-head normal form.
    fn agree(&mut self, op: &Term, v: &Value, depth: usize) -> MResult<bool> {
        if depth > COMPARE_DEPTH {
            return Ok(true);
        }
        let sub = |c: &mut Self, t: &Term, th: &Thunk| -> MResult<bool> {
            let t = c.whnf(t)?;
            let x = c.model.force(th)?;
            c.agree(&t, &x, depth + 1)
        };
        Ok(match (op, v) {
            (_, Value::Unit) => true,
            (Term::Ctor(c), Value::Ctor(n, k, _, _, args)) => {
                if c.ind != *n || c.idx != *k || c.args.len() != args.len() {
                    return Ok(false);
                }
                for (a, th) in c.args.iter().zip(args) {
                    if !sub(self, a, th)? {
                        return Ok(false);
                    }
                }
                true
            }
            (Term::Unknown(a), Value::Exc(true, _)) | (Term::Err(a), Value::Exc(false, _)) => {
                matches!(self.whnf(a)?, Term::Ind(_) | Term::Unknown(_))
            }
            (Term::Univ(i), Value::Univ(j)) => i == j,
            (Term::Unknown(a), Value::UnkU(j)) => **a == Term::Univ(*j),
            (Term::Err(a), Value::ErrU(j)) => **a == Term::Univ(*j),
            (Term::Ind(i), Value::Ind(n, _, ps)) => {
                if i.name != *n || i.params.len() != ps.len() {
                    return Ok(false);
                }
                for (p, th) in i.params.iter().zip(ps) {
                    if !sub(self, p, th)? {
                        return Ok(false);
                    }
                }
                true
            }
            (Term::Pi(_, a, b), Value::Pi(d, cod)) => {
                if !sub(self, a, d)? {
                    return Ok(false);
                }
                let dom = self.model.force(d)?;
                let probe = self.model.exception(&dom, true)?;
                let cv = self.model.apply(cod, Thunk::value(probe))?;
                let b = self.whnf(&b.subst1(&Term::unknown((**a).clone())))?;
                self.agree(&b, &cv, depth + 1)?
            }
            (Term::Lam(..), Value::Fun(_)) => true,
            (Term::Cast(g, u, t), Value::Pair(h, x)) => {
                if !matches!(&**u, Term::Unknown(_)) || head_of(g).as_ref() != Some(h) {
                    return Ok(false);
                }
                sub(self, t, x)?
            }
            _ => false,
        })
    }
}
