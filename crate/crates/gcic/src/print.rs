//! Terms back to concrete syntax. The output parses back to an α-equal term
//! when the same declarations are in scope.

use crate::parse::is_keyword;
use crate::registry::Registry;
use crate::syntax::{Hint, Level, Term, LEVEL_VAR};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Top,
    Arrow,
    App,
    Atom,
}

pub struct Printer<'a> {
    registry: Option<&'a Registry>,
    names: Vec<String>,
}

fn level(l: Level) -> String {
    if l >= LEVEL_VAR {
        match l - LEVEL_VAR {
            0 => "l".into(),
            k => format!("l+{k}"),
        }
    } else {
        l.to_string()
    }
}

fn at(l: Level) -> String {
    if l == 0 {
        String::new()
    } else {
        format!("@{}", level(l))
    }
}

impl<'a> Printer<'a> {
    pub fn new(registry: Option<&'a Registry>) -> Printer<'a> {
        Printer { registry, names: Vec::new() }
    }

    pub fn with_names(registry: Option<&'a Registry>, names: Vec<String>) -> Printer<'a> {
        Printer { registry, names }
    }

    fn taken(&self, s: &str) -> bool {
        is_keyword(s)
            || self.names.iter().any(|n| n == s)
            || self.registry.is_some_and(|r| r.get(s).is_some() || r.ctor(s).is_some())
    }

    /// A printable name for a binder whose body may mention it.
    fn fresh(&self, h: &Hint, used: bool) -> String {
        let base = h.as_str();
        if !used {
            return "_".into();
        }
        let base = if base == "_" || base.is_empty() || base.starts_with('_') && base.len() == 1 { "x" } else { base };
        if !self.taken(base) {
            return base.to_string();
        }
        (1..).map(|k| format!("{base}{k}")).find(|c| !self.taken(c)).expect("infinite supply")
    }

    fn bind<T>(&mut self, names: &[String], f: impl FnOnce(&mut Self) -> T) -> T {
        let n = self.names.len();
        self.names.extend(names.iter().cloned());
        let r = f(self);
        self.names.truncate(n);
        r
    }

    /// Binder names for a telescope of `hints` whose scope is `body` (under
    /// `extra` further binders that are named separately).
    fn fresh_all(&mut self, hints: &[(&Hint, bool)]) -> Vec<String> {
        let mut out = Vec::new();
        for (h, used) in hints {
            let n = self.fresh(h, *used);
            out.push(n.clone());
            self.names.push(n);
        }
        self.names.truncate(self.names.len() - hints.len());
        out
    }

    pub fn term(&mut self, t: &Term) -> String {
        self.go(t, Prec::Top)
    }

    fn paren(s: String, need: bool) -> String {
        if need {
            format!("({s})")
        } else {
            s
        }
    }

    fn go(&mut self, t: &Term, p: Prec) -> String {
        match t {
            Term::Var(k) => match self.names.len().checked_sub(k + 1) {
                Some(i) => self.names[i].clone(),
                None => format!("#{k}"),
            },
            Term::Univ(l) => format!("Type{}", at(*l)),
            Term::SurfaceUnknown(l) => format!("?{}", at(*l)),
            Term::Unknown(a) => format!("?[{}]", self.go(a, Prec::Top)),
            Term::Err(a) => format!("err[{}]", self.go(a, Prec::Top)),
            Term::Cast(a, b, u) => {
                let s = format!("<{} <= {}> {}", self.go(b, Prec::Top), self.go(a, Prec::Top), self.go(u, Prec::Atom));
                Self::paren(s, p > Prec::App)
            }
            Term::Pi(h, a, b) => {
                let used = b.mentions(0);
                let dom = self.go(a, if used { Prec::Top } else { Prec::App });
                let x = self.fresh(h, used);
                let cod = self.bind(std::slice::from_ref(&x), |s| s.go(b, if used { Prec::Top } else { Prec::Arrow }));
                let s = if used { format!("forall ({x} : {dom}), {cod}") } else { format!("{dom} -> {cod}") };
                Self::paren(s, p > if used { Prec::Top } else { Prec::Arrow })
            }
            Term::Lam(h, a, b) => {
                let dom = self.go(a, Prec::Top);
                let x = self.fresh(h, b.mentions(0));
                let body = self.bind(std::slice::from_ref(&x), |s| s.go(b, Prec::Top));
                Self::paren(format!("fun ({x} : {dom}) => {body}"), p > Prec::Top)
            }
            Term::App(f, u) => {
                if let Term::Lam(_, ty, body) = &**f {
                    if **body == Term::Var(0) {
                        let s = format!("{} :: {}", self.go(u, Prec::Arrow), self.go(ty, Prec::Arrow));
                        return Self::paren(s, p > Prec::Top);
                    }
                }
                let s = format!("{} {}", self.go(f, Prec::App), self.go(u, Prec::Atom));
                Self::paren(s, p > Prec::App)
            }
            Term::Ind(i) => {
                let mut s = format!("{}{}", i.name, at(i.level));
                for a in &i.params {
                    s.push(' ');
                    s.push_str(&self.go(a, Prec::Atom));
                }
                Self::paren(s, p > Prec::App && !i.params.is_empty())
            }
            Term::Ctor(c) => {
                if let Some(n) = t.as_numeral() {
                    return n.to_string();
                }
                let name = self
                    .registry
                    .and_then(|r| r.ctor_decl(&c.ind, c.idx))
                    .map(|d| d.name.to_string())
                    .unwrap_or_else(|| format!("{}#{}", c.ind, c.idx));
                let mut s = format!("{name}{}", at(c.level));
                for a in c.params.iter().chain(&c.args) {
                    s.push(' ');
                    s.push_str(&self.go(a, Prec::Atom));
                }
                Self::paren(s, p > Prec::App && !(c.params.is_empty() && c.args.is_empty()))
            }
            Term::Match(m) => {
                let scrut = self.go(&m.scrutinee, Prec::Top);
                let z = self.fresh(&m.as_hint, m.motive.mentions(0));
                let motive = self.bind(std::slice::from_ref(&z), |s| s.go(&m.motive, Prec::Top));
                let fix_used = m.branches.iter().any(|b| b.body.mentions(b.hints.len()));
                let f = self.fresh(&m.fix_hint, fix_used);
                let mut s = String::new();
                let as_part = if z == "_" { String::new() } else { format!(" as {z}") };
                s.push_str(&format!("match {scrut}{as_part} in {} return {motive} with", m.ind));
                for (idx, b) in m.branches.iter().enumerate() {
                    let cname = self
                        .registry
                        .and_then(|r| r.ctor_decl(&m.ind, idx))
                        .map(|d| d.name.to_string())
                        .unwrap_or_else(|| format!("{}#{idx}", m.ind));
                    let n = b.hints.len();
                    let vars = self.bind(std::slice::from_ref(&f), |s| {
                        let hs: Vec<(&Hint, bool)> =
                            b.hints.iter().enumerate().map(|(k, h)| (h, b.body.mentions(n - 1 - k))).collect();
                        s.fresh_all(&hs)
                    });
                    let mut names = vec![f.clone()];
                    names.extend(vars.iter().cloned());
                    let body = self.bind(&names, |s| s.go(&b.body, Prec::Top));
                    s.push_str(&format!(" | {cname}"));
                    for v in &vars {
                        s.push(' ');
                        s.push_str(v);
                    }
                    s.push_str(&format!(" => {body}"));
                }
                s.push_str(" end");
                if fix_used {
                    s.push_str(&format!(" rec {f}"));
                }
                s
            }
            Term::Vec(l, a, n) => {
                let s = format!("vec{} {} {}", at(*l), self.go(a, Prec::Atom), self.go(n, Prec::Atom));
                Self::paren(s, p > Prec::App)
            }
            Term::Nil(n) => {
                let s = format!("nil{}{} {}", if n.unk { "?" } else { "" }, at(n.level), self.go(&n.elem, Prec::Atom));
                Self::paren(s, p > Prec::App)
            }
            Term::Cons(c) => {
                let s = format!(
                    "cons{}{} {} {} {} {}",
                    if c.unk { "?" } else { "" },
                    at(c.level),
                    self.go(&c.elem, Prec::Atom),
                    self.go(&c.head, Prec::Atom),
                    self.go(&c.len, Prec::Atom),
                    self.go(&c.tail, Prec::Atom)
                );
                Self::paren(s, p > Prec::App)
            }
            Term::VecRect(r) => {
                let scrut = self.go(&r.scrutinee, Prec::Top);
                let mh: Vec<(&Hint, bool)> = vec![(&r.motive_hints[0], true), (&r.motive_hints[1], true)];
                let mn = self.fresh_all(&mh);
                let motive = self.bind(&mn, |s| s.go(&r.motive, Prec::Top));
                let nil_case = self.go(&r.nil_case, Prec::Top);
                let ch: Vec<(&Hint, bool)> = r.cons_hints.iter().map(|h| (h, true)).collect();
                let cn = self.fresh_all(&ch);
                let cons_case = self.bind(&cn, |s| s.go(&r.cons_case, Prec::Top));
                format!(
                    "vec_rect {scrut} as {} {} return {motive} with | nil => {nil_case} | cons {} {} {} {} => {cons_case} end",
                    mn[0], mn[1], cn[0], cn[1], cn[2], cn[3]
                )
            }
        }
    }
}

/// Prints a closed term.
pub fn show(t: &Term, registry: Option<&Registry>) -> String {
    Printer::new(registry).term(t)
}

/// Prints a term in a context with the given variable names (outermost first).
pub fn show_in(t: &Term, registry: Option<&Registry>, names: &[String]) -> String {
    Printer::with_names(registry, names.to_vec()).term(t)
}
