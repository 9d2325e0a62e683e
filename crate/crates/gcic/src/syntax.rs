//! Core terms in de Bruijn form, shared by the surface language, the cast
//! calculus and every judgement built on top of them.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

pub type Level = u32;
pub type Name = Arc<str>;

/// Levels at or above this value are level variables of an inductive
/// declaration template, offset by the difference.
pub const LEVEL_VAR: Level = 1 << 24;

/// A binder name kept only for printing. Equality and hashing ignore it, so
/// the derived `PartialEq` on [`Term`] is α-equivalence.
#[derive(Clone, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Hint(pub Name);

impl Hint {
    pub fn new(s: &str) -> Hint {
        Hint(Arc::from(s))
    }
    pub fn anon() -> Hint {
        Hint::new("x")
    }
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl PartialEq for Hint {
    fn eq(&self, _: &Hint) -> bool {
        true
    }
}
impl Eq for Hint {}
impl Hash for Hint {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}
impl fmt::Debug for Hint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Term {
    Var(usize),
    Univ(Level),
    Pi(Hint, Arc<Term>, Arc<Term>),
    Lam(Hint, Arc<Term>, Arc<Term>),
    App(Arc<Term>, Arc<Term>),
    Ind(Arc<Ind>),
    Ctor(Arc<Ctor>),
    Match(Arc<Match>),
    /// `?_T`
    Unknown(Arc<Term>),
    /// `err_T`
    Err(Arc<Term>),
    /// `Cast(A, B, t)` is the cast of `t` from `A` to `B`.
    Cast(Arc<Term>, Arc<Term>, Arc<Term>),
    /// The surface `?@i`.
    SurfaceUnknown(Level),
    /// `vec@i A n`
    Vec(Level, Arc<Term>, Arc<Term>),
    Nil(Arc<Nil>),
    Cons(Arc<Cons>),
    VecRect(Arc<VecRect>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ind {
    pub name: Name,
    pub level: Level,
    pub params: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ctor {
    pub ind: Name,
    pub idx: usize,
    pub level: Level,
    pub params: Vec<Term>,
    pub args: Vec<Term>,
}

/// A fixpoint immediately followed by a match. The motive binds the
/// scrutinee; each branch binds the recursive function, then the
/// constructor arguments.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Match {
    pub ind: Name,
    pub scrutinee: Term,
    pub as_hint: Hint,
    pub motive: Term,
    pub fix_hint: Hint,
    pub branches: Vec<Branch>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Branch {
    pub hints: Vec<Hint>,
    pub body: Term,
}

/// `nil@i A`, or `nil?@i A` when `unk` is set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Nil {
    pub unk: bool,
    pub level: Level,
    pub elem: Term,
}

/// `cons@i A a n v`, or `cons?@i A a n v` when `unk` is set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cons {
    pub unk: bool,
    pub level: Level,
    pub elem: Term,
    pub head: Term,
    pub len: Term,
    pub tail: Term,
}

/// Vector recursor. The motive binds the index then the vector; the cons
/// case binds the head, the length, the tail and the recursive result.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VecRect {
    pub scrutinee: Term,
    pub motive_hints: [Hint; 2],
    pub motive: Term,
    pub nil_case: Term,
    pub cons_hints: [Hint; 4],
    pub cons_case: Term,
}

pub const NAT: &str = "nat";
pub const BOOL: &str = "bool";

impl Term {
    pub fn var(k: usize) -> Term {
        Term::Var(k)
    }
    pub fn univ(i: Level) -> Term {
        Term::Univ(i)
    }
    pub fn pi(h: &str, a: Term, b: Term) -> Term {
        Term::Pi(Hint::new(h), Arc::new(a), Arc::new(b))
    }
    pub fn arrow(a: Term, b: Term) -> Term {
        Term::Pi(Hint::new("_"), Arc::new(a), Arc::new(b.lift(1, 0)))
    }
    pub fn lam(h: &str, a: Term, t: Term) -> Term {
        Term::Lam(Hint::new(h), Arc::new(a), Arc::new(t))
    }
    pub fn app(f: Term, u: Term) -> Term {
        Term::App(Arc::new(f), Arc::new(u))
    }
    pub fn apps(f: Term, us: impl IntoIterator<Item = Term>) -> Term {
        us.into_iter().fold(f, Term::app)
    }
    pub fn unknown(t: Term) -> Term {
        Term::Unknown(Arc::new(t))
    }
    pub fn err(t: Term) -> Term {
        Term::Err(Arc::new(t))
    }
    /// Cast of `t` from `from` to `to`.
    pub fn cast(from: Term, to: Term, t: Term) -> Term {
        Term::Cast(Arc::new(from), Arc::new(to), Arc::new(t))
    }
    pub fn ind(name: &str, level: Level, params: Vec<Term>) -> Term {
        Term::Ind(Arc::new(Ind { name: Arc::from(name), level, params }))
    }
    pub fn ctor(ind: &str, idx: usize, level: Level, params: Vec<Term>, args: Vec<Term>) -> Term {
        Term::Ctor(Arc::new(Ctor { ind: Arc::from(ind), idx, level, params, args }))
    }
    pub fn nat() -> Term {
        Term::ind(NAT, 0, vec![])
    }
    pub fn bool() -> Term {
        Term::ind(BOOL, 0, vec![])
    }
    pub fn zero() -> Term {
        Term::ctor(NAT, 0, 0, vec![], vec![])
    }
    pub fn succ(n: Term) -> Term {
        Term::ctor(NAT, 1, 0, vec![], vec![n])
    }
    pub fn numeral(n: u64) -> Term {
        (0..n).fold(Term::zero(), |t, _| Term::succ(t))
    }
    pub fn boolean(b: bool) -> Term {
        Term::ctor(BOOL, if b { 0 } else { 1 }, 0, vec![], vec![])
    }
    /// `?_{□i}`
    pub fn unk_univ(i: Level) -> Term {
        Term::unknown(Term::Univ(i))
    }
    pub fn vec_ty(level: Level, elem: Term, len: Term) -> Term {
        Term::Vec(level, Arc::new(elem), Arc::new(len))
    }
    pub fn nil(unk: bool, level: Level, elem: Term) -> Term {
        Term::Nil(Arc::new(Nil { unk, level, elem }))
    }
    pub fn cons(unk: bool, level: Level, elem: Term, head: Term, len: Term, tail: Term) -> Term {
        Term::Cons(Arc::new(Cons { unk, level, elem, head, len, tail }))
    }

    /// Reads back a numeral built from `nat@0` constructors.
    pub fn as_numeral(&self) -> Option<u64> {
        let mut n = 0;
        let mut t = self;
        loop {
            match t {
                Term::Ctor(c) if &*c.ind == NAT && c.level == 0 && c.params.is_empty() => {
                    if c.idx == 0 && c.args.is_empty() {
                        return Some(n);
                    }
                    if c.idx == 1 && c.args.len() == 1 {
                        n += 1;
                        t = &c.args[0];
                        continue;
                    }
                    return None;
                }
                _ => return None,
            }
        }
    }

    /// Immediate subterms, each paired with the number of binders it sits under.
    pub fn children(&self) -> Vec<(usize, &Term)> {
        match self {
            Term::Var(_) | Term::Univ(_) | Term::SurfaceUnknown(_) => vec![],
            Term::Pi(_, a, b) | Term::Lam(_, a, b) => vec![(0, a), (1, b)],
            Term::App(f, u) => vec![(0, f), (0, u)],
            Term::Ind(i) => i.params.iter().map(|p| (0, p)).collect(),
            Term::Ctor(c) => c.params.iter().chain(&c.args).map(|p| (0, p)).collect(),
            Term::Match(m) => {
                let mut v = vec![(0, &m.scrutinee), (1, &m.motive)];
                v.extend(m.branches.iter().map(|b| (1 + b.hints.len(), &b.body)));
                v
            }
            Term::Unknown(t) | Term::Err(t) => vec![(0, t)],
            Term::Cast(a, b, t) => vec![(0, a), (0, b), (0, t)],
            Term::Vec(_, a, n) => vec![(0, a), (0, n)],
            Term::Nil(n) => vec![(0, &n.elem)],
            Term::Cons(c) => vec![(0, &c.elem), (0, &c.head), (0, &c.len), (0, &c.tail)],
            Term::VecRect(r) => vec![(0, &r.scrutinee), (2, &r.motive), (0, &r.nil_case), (4, &r.cons_case)],
        }
    }

    /// Rebuilds the node with `f(binders, child)` in place of each immediate
    /// subterm, in the order of [`Term::children`].
    pub fn map_children(&self, mut f: impl FnMut(usize, &Term) -> Term) -> Term {
        let a = |f: &mut dyn FnMut(usize, &Term) -> Term, k, t: &Term| Arc::new(f(k, t));
        match self {
            Term::Var(_) | Term::Univ(_) | Term::SurfaceUnknown(_) => self.clone(),
            Term::Pi(h, x, y) => {
                let x = a(&mut f, 0, x);
                Term::Pi(h.clone(), x, a(&mut f, 1, y))
            }
            Term::Lam(h, x, y) => {
                let x = a(&mut f, 0, x);
                Term::Lam(h.clone(), x, a(&mut f, 1, y))
            }
            Term::App(x, y) => {
                let x = a(&mut f, 0, x);
                Term::App(x, a(&mut f, 0, y))
            }
            Term::Ind(i) => Term::Ind(Arc::new(Ind {
                name: i.name.clone(),
                level: i.level,
                params: i.params.iter().map(|p| f(0, p)).collect(),
            })),
            Term::Ctor(c) => Term::Ctor(Arc::new(Ctor {
                ind: c.ind.clone(),
                idx: c.idx,
                level: c.level,
                params: c.params.iter().map(|p| f(0, p)).collect(),
                args: c.args.iter().map(|p| f(0, p)).collect(),
            })),
            Term::Match(m) => {
                let scrutinee = f(0, &m.scrutinee);
                let motive = f(1, &m.motive);
                let branches = m
                    .branches
                    .iter()
                    .map(|b| Branch { hints: b.hints.clone(), body: f(1 + b.hints.len(), &b.body) })
                    .collect();
                Term::Match(Arc::new(Match {
                    ind: m.ind.clone(),
                    scrutinee,
                    as_hint: m.as_hint.clone(),
                    motive,
                    fix_hint: m.fix_hint.clone(),
                    branches,
                }))
            }
            Term::Unknown(t) => Term::Unknown(a(&mut f, 0, t)),
            Term::Err(t) => Term::Err(a(&mut f, 0, t)),
            Term::Cast(x, y, t) => {
                let x = a(&mut f, 0, x);
                let y = a(&mut f, 0, y);
                Term::Cast(x, y, a(&mut f, 0, t))
            }
            Term::Vec(l, x, n) => {
                let x = a(&mut f, 0, x);
                Term::Vec(*l, x, a(&mut f, 0, n))
            }
            Term::Nil(n) => Term::nil(n.unk, n.level, f(0, &n.elem)),
            Term::Cons(c) => {
                let elem = f(0, &c.elem);
                let head = f(0, &c.head);
                let len = f(0, &c.len);
                Term::cons(c.unk, c.level, elem, head, len, f(0, &c.tail))
            }
            Term::VecRect(r) => {
                let scrutinee = f(0, &r.scrutinee);
                let motive = f(2, &r.motive);
                let nil_case = f(0, &r.nil_case);
                let cons_case = f(4, &r.cons_case);
                Term::VecRect(Arc::new(VecRect {
                    scrutinee,
                    motive_hints: r.motive_hints.clone(),
                    motive,
                    nil_case,
                    cons_hints: r.cons_hints.clone(),
                    cons_case,
                }))
            }
        }
    }

    /// Whether two nodes agree on everything except their subterms, so that
    /// their children can be compared pairwise.
    pub fn same_shape(&self, other: &Term) -> bool {
        use Term::*;
        match (self, other) {
            (Var(i), Var(j)) => i == j,
            (Univ(i), Univ(j)) | (SurfaceUnknown(i), SurfaceUnknown(j)) => i == j,
            (Pi(..), Pi(..)) | (Lam(..), Lam(..)) | (App(..), App(..)) => true,
            (Unknown(_), Unknown(_)) | (Err(_), Err(_)) | (Cast(..), Cast(..)) => true,
            (Ind(a), Ind(b)) => a.name == b.name && a.level == b.level && a.params.len() == b.params.len(),
            (Ctor(a), Ctor(b)) => {
                a.ind == b.ind
                    && a.idx == b.idx
                    && a.level == b.level
                    && a.params.len() == b.params.len()
                    && a.args.len() == b.args.len()
            }
            (Match(a), Match(b)) => {
                a.ind == b.ind
                    && a.branches.len() == b.branches.len()
                    && a.branches.iter().zip(&b.branches).all(|(x, y)| x.hints.len() == y.hints.len())
            }
            (Vec(i, ..), Vec(j, ..)) => i == j,
            (Nil(a), Nil(b)) => a.unk == b.unk && a.level == b.level,
            (Cons(a), Cons(b)) => a.unk == b.unk && a.level == b.level,
            (VecRect(_), VecRect(_)) => true,
            _ => false,
        }
    }

    /// Shifts free variables at or above `cutoff` by `by`.
    pub fn lift(&self, by: usize, cutoff: usize) -> Term {
        if by == 0 {
            return self.clone();
        }
        match self {
            Term::Var(k) if *k >= cutoff => Term::Var(k + by),
            Term::Var(_) => self.clone(),
            _ => self.map_children(|d, c| c.lift(by, cutoff + d)),
        }
    }

    /// Simultaneous substitution of the variables `depth .. depth + n` by
    /// `vals`, given in binding order (`vals[0]` replaces the outermost).
    /// Variables above are lowered by `n`.
    pub fn subst(&self, depth: usize, vals: &[Term]) -> Term {
        let n = vals.len();
        if n == 0 {
            return self.clone();
        }
        match self {
            Term::Var(k) if *k < depth => self.clone(),
            Term::Var(k) if *k < depth + n => vals[n - 1 - (k - depth)].lift(depth, 0),
            Term::Var(k) => Term::Var(k - n),
            _ => self.map_children(|d, c| c.subst(depth + d, vals)),
        }
    }

    /// `self[u/0]`
    pub fn subst1(&self, u: &Term) -> Term {
        self.subst(0, std::slice::from_ref(u))
    }

    /// Instantiates the `vals.len()` innermost binders of `self`.
    pub fn instantiate(&self, vals: &[Term]) -> Term {
        self.subst(0, vals)
    }

    /// Whether any variable at or above `depth` occurs free.
    pub fn has_free_above(&self, depth: usize) -> bool {
        match self {
            Term::Var(k) => *k >= depth,
            _ => self.children().into_iter().any(|(d, c)| c.has_free_above(depth + d)),
        }
    }

    pub fn is_closed(&self) -> bool {
        !self.has_free_above(0)
    }

    /// Whether variable `k` occurs free.
    pub fn mentions(&self, k: usize) -> bool {
        match self {
            Term::Var(j) => *j == k,
            _ => self.children().into_iter().any(|(d, c)| c.mentions(k + d)),
        }
    }

    /// True iff every free variable index is below `depth`.
    pub fn well_scoped(&self, depth: usize) -> bool {
        !self.has_free_above(depth)
    }

    pub fn any(&self, p: &impl Fn(&Term) -> bool) -> bool {
        p(self) || self.children().into_iter().any(|(_, c)| c.any(p))
    }

    /// No `?`, `err`, cast, or surface unknown anywhere.
    pub fn is_static(&self) -> bool {
        !self.any(&|t| {
            matches!(t, Term::Unknown(_) | Term::Err(_) | Term::Cast(..) | Term::SurfaceUnknown(_))
                || matches!(t, Term::Nil(n) if n.unk)
                || matches!(t, Term::Cons(c) if c.unk)
        })
    }

    /// No `?_T`, `err_T` or cast: the term can be fed to elaboration.
    pub fn is_source(&self) -> bool {
        !self.any(&|t| {
            matches!(t, Term::Unknown(_) | Term::Err(_) | Term::Cast(..))
                || matches!(t, Term::Nil(n) if n.unk)
                || matches!(t, Term::Cons(c) if c.unk)
        })
    }

    /// No surface unknown: a cast-calculus term.
    pub fn is_castcic(&self) -> bool {
        !self.any(&|t| matches!(t, Term::SurfaceUnknown(_)))
    }

    /// Rewrites every level with `f` (universes, inductive and vector levels).
    pub fn map_levels(&self, f: &impl Fn(Level) -> Level) -> Term {
        let t = self.map_children(|_, c| c.map_levels(f));
        match t {
            Term::Univ(l) => Term::Univ(f(l)),
            Term::SurfaceUnknown(l) => Term::SurfaceUnknown(f(l)),
            Term::Ind(i) => {
                let mut i = Arc::unwrap_or_clone(i);
                i.level = f(i.level);
                Term::Ind(Arc::new(i))
            }
            Term::Ctor(c) => {
                let mut c = Arc::unwrap_or_clone(c);
                c.level = f(c.level);
                Term::Ctor(Arc::new(c))
            }
            Term::Vec(l, a, n) => Term::Vec(f(l), a, n),
            Term::Nil(n) => {
                let mut n = Arc::unwrap_or_clone(n);
                n.level = f(n.level);
                Term::Nil(Arc::new(n))
            }
            Term::Cons(c) => {
                let mut c = Arc::unwrap_or_clone(c);
                c.level = f(c.level);
                Term::Cons(Arc::new(c))
            }
            t => t,
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(|(_, c)| c.size()).sum::<usize>()
    }
}

/// Structural equality on the de Bruijn representation.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    a == b
}

/// Simultaneous substitution, see [`Term::subst`].
pub fn subst(t: &Term, vals: &[Term], depth: usize) -> Term {
    t.subst(depth, vals)
}

/// One declaration of a typing context.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Decl {
    pub hint: Hint,
    pub ty: Term,
}

/// Typing context; the last declaration is variable 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Context {
    pub decls: Vec<Decl>,
}

impl Context {
    pub fn new() -> Context {
        Context::default()
    }
    pub fn len(&self) -> usize {
        self.decls.len()
    }
    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }
    pub fn push(&mut self, hint: Hint, ty: Term) {
        self.decls.push(Decl { hint, ty });
    }
    pub fn pop(&mut self) {
        self.decls.pop();
    }
    pub fn extend(&self, hint: Hint, ty: Term) -> Context {
        let mut c = self.clone();
        c.push(hint, ty);
        c
    }
    /// Type of variable `k`, lifted into the full context.
    pub fn lookup(&self, k: usize) -> Option<Term> {
        let n = self.decls.len();
        if k >= n {
            return None;
        }
        Some(self.decls[n - 1 - k].ty.lift(k + 1, 0))
    }
    pub fn names(&self) -> Vec<Name> {
        self.decls.iter().map(|d| d.hint.0.clone()).collect()
    }
}
