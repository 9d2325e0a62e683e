//! Concrete syntax. Text is parsed into a named tree, which is then
//! resolved against the inductive declarations and earlier definitions.
//!
//! ```text
//! Type@i   ?@i   fun (x : A) => t   forall (x : A), B   A -> B   f u   t :: T
//! match t as z in I return P with | C x y => u end rec f
//! ?[T]   err[T]   <B <= A> t
//! vec@i A n   nil@i A   cons@i A a n v   nil?@i A   cons?@i A a n v
//! vec_rect v as n w return P with | nil => t | cons a n w ih => u end
//! inductive list@l (A : Type@l) := | lnil : list A | lcons : A -> list A -> list A
//! def id : forall (A : Type@0), A -> A := fun (A : Type@0) (x : A) => x
//! ```

use crate::registry::{CtorDecl, Inductive, Registry};
use crate::syntax::{Branch, Hint, Level, Match, Term, VecRect, LEVEL_VAR};
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{span}: {msg}")]
pub struct ParseError {
    pub span: Span,
    pub msg: String,
}

fn perr<T>(span: Span, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { span, msg: msg.into() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    Sym(&'static str),
    Eof,
}

const SYMBOLS: [&str; 19] =
    [":=", "=>", "->", "<=", "::", "(", ")", "[", "]", ":", ",", "|", "@", "?", "<", ">", "+", "_", "."];

const KEYWORDS: [&str; 20] = [
    "fun",
    "forall",
    "match",
    "as",
    "in",
    "return",
    "with",
    "end",
    "rec",
    "def",
    "inductive",
    "Type",
    "err",
    "vec",
    "nil",
    "cons",
    "nil?",
    "cons?",
    "vec_rect",
    "eval",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

fn lex(src: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let bump = |i: &mut usize, line: &mut usize, col: &mut usize, c: char| {
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    'outer: while i < chars.len() {
        let c = chars[i];
        let span = Span { line, col };
        if c.is_whitespace() {
            bump(&mut i, &mut line, &mut col, c);
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                {
                    let ch = chars[i];
                    bump(&mut i, &mut line, &mut col, ch);
                }
            }
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                s.push(chars[i]);
                {
                    let ch = chars[i];
                    bump(&mut i, &mut line, &mut col, ch);
                }
            }
            let n = s.parse().map_err(|_| ParseError { span, msg: format!("numeral `{s}` too large") })?;
            out.push((Tok::Num(n), span));
            continue;
        }
        if c.is_alphabetic() || (c == '_' && chars.get(i + 1).is_some_and(|d| d.is_alphanumeric() || *d == '_')) {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                s.push(chars[i]);
                {
                    let ch = chars[i];
                    bump(&mut i, &mut line, &mut col, ch);
                }
            }
            if (s == "nil" || s == "cons") && chars.get(i) == Some(&'?') {
                s.push('?');
                bump(&mut i, &mut line, &mut col, '?');
            }
            out.push((Tok::Ident(s), span));
            continue;
        }
        for sym in SYMBOLS {
            let n = sym.chars().count();
            if chars[i..].iter().take(n).copied().eq(sym.chars()) {
                for _ in 0..n {
                    {
                        let ch = chars[i];
                        bump(&mut i, &mut line, &mut col, ch);
                    }
                }
                out.push((Tok::Sym(sym), span));
                continue 'outer;
            }
        }
        return perr(span, format!("unexpected character `{c}`"));
    }
    out.push((Tok::Eof, Span { line, col }));
    Ok(out)
}

/// A level as written: a constant, or the declaration's level variable plus an offset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lvl {
    Const(Level),
    Var(Level),
}

impl Lvl {
    pub fn get(self) -> Level {
        match self {
            Lvl::Const(l) => l,
            Lvl::Var(k) => LEVEL_VAR + k,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Ident(String, Option<Lvl>, Span),
    Num(u64),
    Type(Lvl),
    Unk(Lvl),
    UnkAt(Box<Expr>),
    ErrAt(Box<Expr>),
    /// `<to <= from> body`
    Cast(Box<Expr>, Box<Expr>, Box<Expr>),
    Pi(String, Box<Expr>, Box<Expr>),
    Lam(String, Box<Expr>, Box<Expr>),
    App(Box<Expr>, Box<Expr>),
    Ascribe(Box<Expr>, Box<Expr>),
    Match(Box<MatchExpr>),
    VecTy(Lvl, Box<Expr>, Box<Expr>),
    Nil(bool, Lvl, Box<Expr>),
    Cons(bool, Lvl, Box<[Expr; 4]>),
    VecRect(Box<RectExpr>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchExpr {
    pub span: Span,
    pub fix: Option<String>,
    pub scrutinee: Expr,
    pub as_name: Option<String>,
    pub ind: Option<String>,
    pub motive: Expr,
    pub branches: Vec<BranchExpr>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchExpr {
    pub span: Span,
    pub ctor: String,
    pub vars: Vec<String>,
    pub body: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RectExpr {
    pub span: Span,
    pub scrutinee: Expr,
    pub motive_names: [String; 2],
    pub motive: Expr,
    pub nil_case: Expr,
    pub cons_names: [String; 4],
    pub cons_case: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndDecl {
    pub span: Span,
    pub name: String,
    pub level_var: Option<String>,
    pub params: Vec<(String, Expr)>,
    /// Each constructor with its type, a product telescope ending in the
    /// inductive applied to its parameters; `None` for a constant.
    pub ctors: Vec<(String, Option<Expr>)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Item {
    Inductive(IndDecl),
    Def { span: Span, name: String, ty: Option<Expr>, body: Expr },
    Eval(Expr),
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    level_var: Option<String>,
}

impl Parser {
    fn new(src: &str) -> Result<Parser, ParseError> {
        Ok(Parser { toks: lex(src)?, pos: 0, level_var: None })
    }
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }
    fn span(&self) -> Span {
        self.toks[self.pos].1
    }
    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }
    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }
    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }
    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.advance();
            true
        } else {
            false
        }
    }
    fn eat_kw(&mut self, s: &str) -> bool {
        if self.is_kw(s) {
            self.advance();
            true
        } else {
            false
        }
    }
    fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            perr(self.span(), format!("expected `{s}`, found {}", self.describe()))
        }
    }
    fn expect_kw(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_kw(s) {
            Ok(())
        } else {
            perr(self.span(), format!("expected `{s}`, found {}", self.describe()))
        }
    }
    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    /// A binder name: an identifier that is not a keyword, or `_`.
    fn name(&mut self) -> Result<String, ParseError> {
        if self.eat_sym("_") {
            return Ok("_".into());
        }
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) => {
                self.advance();
                Ok(s)
            }
            _ => perr(self.span(), format!("expected a name, found {}", self.describe())),
        }
    }

    fn level(&mut self) -> Result<Lvl, ParseError> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.advance();
                Ok(Lvl::Const(n as Level))
            }
            Tok::Ident(s) if Some(&s) == self.level_var.as_ref() => {
                self.advance();
                let mut k = 0;
                if self.eat_sym("+") {
                    match self.advance() {
                        Tok::Num(n) => k = n as Level,
                        _ => return perr(self.span(), "expected a number after `+`"),
                    }
                }
                Ok(Lvl::Var(k))
            }
            _ => perr(self.span(), format!("expected a level, found {}", self.describe())),
        }
    }

    fn opt_level(&mut self) -> Result<Option<Lvl>, ParseError> {
        if self.eat_sym("@") {
            Ok(Some(self.level()?))
        } else {
            Ok(None)
        }
    }

    /// `(x y : A) (z : B)`
    fn binders(&mut self) -> Result<Vec<(String, Expr)>, ParseError> {
        let mut out = Vec::new();
        while self.is_sym("(") {
            self.advance();
            let mut names = vec![self.name()?];
            while !self.is_sym(":") {
                names.push(self.name()?);
            }
            self.expect_sym(":")?;
            let ty = self.expr()?;
            self.expect_sym(")")?;
            out.extend(names.into_iter().map(|n| (n, ty.clone())));
        }
        Ok(out)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.arrow()?;
        while self.eat_sym("::") {
            let ty = self.arrow()?;
            e = Expr::Ascribe(Box::new(e), Box::new(ty));
        }
        Ok(e)
    }

    fn arrow(&mut self) -> Result<Expr, ParseError> {
        if self.eat_kw("fun") {
            let bs = self.binders()?;
            if bs.is_empty() {
                return perr(self.span(), "expected binders after `fun`");
            }
            self.expect_sym("=>")?;
            let body = self.expr()?;
            return Ok(bs.into_iter().rev().fold(body, |b, (x, a)| Expr::Lam(x, Box::new(a), Box::new(b))));
        }
        if self.eat_kw("forall") {
            let bs = self.binders()?;
            if bs.is_empty() {
                return perr(self.span(), "expected binders after `forall`");
            }
            self.expect_sym(",")?;
            let body = self.expr()?;
            return Ok(bs.into_iter().rev().fold(body, |b, (x, a)| Expr::Pi(x, Box::new(a), Box::new(b))));
        }
        let lhs = self.app()?;
        if self.eat_sym("->") {
            let rhs = self.arrow()?;
            return Ok(Expr::Pi("_".into(), Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::Num(_) => true,
            Tok::Sym(s) => matches!(*s, "(" | "?" | "<"),
            Tok::Ident(s) => !matches!(
                s.as_str(),
                "fun" | "forall" | "as" | "in" | "return" | "with" | "end" | "rec" | "def" | "inductive" | "eval"
            ),
            Tok::Eof => false,
        }
    }

    fn app(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.atom()?;
        while self.starts_atom() {
            let a = self.atom()?;
            e = Expr::App(Box::new(e), Box::new(a));
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Num(n) => {
                self.advance();
                Ok(Expr::Num(n))
            }
            Tok::Sym("(") => {
                self.advance();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Sym("?") => {
                self.advance();
                if self.eat_sym("[") {
                    let t = self.expr()?;
                    self.expect_sym("]")?;
                    return Ok(Expr::UnkAt(Box::new(t)));
                }
                Ok(Expr::Unk(self.opt_level()?.unwrap_or(Lvl::Const(0))))
            }
            Tok::Sym("<") => {
                self.advance();
                let to = self.expr()?;
                self.expect_sym("<=")?;
                let from = self.expr()?;
                self.expect_sym(">")?;
                let body = self.atom()?;
                Ok(Expr::Cast(Box::new(to), Box::new(from), Box::new(body)))
            }
            Tok::Ident(s) => match s.as_str() {
                "Type" => {
                    self.advance();
                    Ok(Expr::Type(self.opt_level()?.unwrap_or(Lvl::Const(0))))
                }
                "err" => {
                    self.advance();
                    self.expect_sym("[")?;
                    let t = self.expr()?;
                    self.expect_sym("]")?;
                    Ok(Expr::ErrAt(Box::new(t)))
                }
                "match" => self.match_expr(),
                "vec_rect" => self.rect_expr(),
                "vec" => {
                    self.advance();
                    let l = self.opt_level()?.unwrap_or(Lvl::Const(0));
                    let a = self.atom()?;
                    let n = self.atom()?;
                    Ok(Expr::VecTy(l, Box::new(a), Box::new(n)))
                }
                "nil" | "nil?" => {
                    self.advance();
                    let l = self.opt_level()?.unwrap_or(Lvl::Const(0));
                    let a = self.atom()?;
                    Ok(Expr::Nil(s == "nil?", l, Box::new(a)))
                }
                "cons" | "cons?" => {
                    self.advance();
                    let l = self.opt_level()?.unwrap_or(Lvl::Const(0));
                    let parts = [self.atom()?, self.atom()?, self.atom()?, self.atom()?];
                    Ok(Expr::Cons(s == "cons?", l, Box::new(parts)))
                }
                _ if is_keyword(&s) => perr(span, format!("unexpected keyword `{s}`")),
                _ => {
                    self.advance();
                    let l = self.opt_level()?;
                    Ok(Expr::Ident(s, l, span))
                }
            },
            _ => perr(span, format!("expected a term, found {}", self.describe())),
        }
    }

    fn match_expr(&mut self) -> Result<Expr, ParseError> {
        let span = self.span();
        self.expect_kw("match")?;
        let scrutinee = self.expr()?;
        let as_name = if self.eat_kw("as") { Some(self.name()?) } else { None };
        let ind = if self.eat_kw("in") { Some(self.name()?) } else { None };
        self.expect_kw("return")?;
        let motive = self.expr()?;
        self.expect_kw("with")?;
        let mut branches = Vec::new();
        while self.eat_sym("|") {
            let bspan = self.span();
            let ctor = self.name()?;
            let mut vars = Vec::new();
            while !self.is_sym("=>") {
                vars.push(self.name()?);
            }
            self.expect_sym("=>")?;
            let body = self.expr()?;
            branches.push(BranchExpr { span: bspan, ctor, vars, body });
        }
        self.expect_kw("end")?;
        let fix = if self.eat_kw("rec") { Some(self.name()?) } else { None };
        Ok(Expr::Match(Box::new(MatchExpr { span, fix, scrutinee, as_name, ind, motive, branches })))
    }

    fn rect_expr(&mut self) -> Result<Expr, ParseError> {
        let span = self.span();
        self.expect_kw("vec_rect")?;
        let scrutinee = self.expr()?;
        self.expect_kw("as")?;
        let motive_names = [self.name()?, self.name()?];
        self.expect_kw("return")?;
        let motive = self.expr()?;
        self.expect_kw("with")?;
        self.expect_sym("|")?;
        self.expect_kw("nil")?;
        self.expect_sym("=>")?;
        let nil_case = self.expr()?;
        self.expect_sym("|")?;
        self.expect_kw("cons")?;
        let cons_names = [self.name()?, self.name()?, self.name()?, self.name()?];
        self.expect_sym("=>")?;
        let cons_case = self.expr()?;
        self.expect_kw("end")?;
        Ok(Expr::VecRect(Box::new(RectExpr { span, scrutinee, motive_names, motive, nil_case, cons_names, cons_case })))
    }

    fn item(&mut self) -> Result<Item, ParseError> {
        let span = self.span();
        if self.eat_kw("inductive") {
            let name = self.name()?;
            let level_var = if self.eat_sym("@") { Some(self.name()?) } else { None };
            self.level_var = level_var.clone();
            let params = self.binders()?;
            self.expect_sym(":=")?;
            let mut ctors = Vec::new();
            while self.eat_sym("|") {
                let c = self.name()?;
                let ty = if self.eat_sym(":") { Some(self.expr()?) } else { None };
                ctors.push((c, ty));
            }
            self.level_var = None;
            return Ok(Item::Inductive(IndDecl { span, name, level_var, params, ctors }));
        }
        if self.eat_kw("def") {
            let name = self.name()?;
            let bs = self.binders()?;
            let ty = if self.eat_sym(":") { Some(self.expr()?) } else { None };
            self.expect_sym(":=")?;
            let body = self.expr()?;
            // `def f (x : A) : B := t` abbreviates `def f : forall (x : A), B := fun (x : A) => t`
            let ty =
                ty.map(|t| bs.iter().rev().fold(t, |b, (x, a)| Expr::Pi(x.clone(), Box::new(a.clone()), Box::new(b))));
            let body = bs.into_iter().rev().fold(body, |b, (x, a)| Expr::Lam(x, Box::new(a), Box::new(b)));
            return Ok(Item::Def { span, name, ty, body });
        }
        if self.eat_kw("eval") {
            return Ok(Item::Eval(self.expr()?));
        }
        perr(span, format!("expected `inductive`, `def` or `eval`, found {}", self.describe()))
    }
}

/// Parses a whole file of items.
pub fn parse_items(src: &str) -> Result<Vec<Item>, ParseError> {
    let mut p = Parser::new(src)?;
    let mut items = Vec::new();
    while *p.peek() != Tok::Eof {
        items.push(p.item()?);
        p.eat_sym(".");
    }
    Ok(items)
}

/// Parses a single term.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return perr(p.span(), format!("unexpected {} after term", p.describe()));
    }
    Ok(e)
}

/// Names visible while resolving.
pub struct Scope<'a> {
    pub registry: &'a Registry,
    pub defs: &'a HashMap<String, Term>,
    /// The inductive being declared, with its parameter count.
    current: Option<(String, usize)>,
    vars: Vec<String>,
}

impl<'a> Scope<'a> {
    pub fn new(registry: &'a Registry, defs: &'a HashMap<String, Term>) -> Scope<'a> {
        Scope { registry, defs, current: None, vars: Vec::new() }
    }

    fn with<T>(&mut self, names: &[String], f: impl FnOnce(&mut Self) -> T) -> T {
        let n = self.vars.len();
        self.vars.extend(names.iter().cloned());
        let r = f(self);
        self.vars.truncate(n);
        r
    }

    fn var(&self, name: &str) -> Option<usize> {
        if name == "_" {
            return None;
        }
        self.vars.iter().rev().position(|v| v == name)
    }

    /// What a global name denotes: an inductive (params), a constructor
    /// (inductive, index, params, args) or nothing.
    fn global(&self, name: &str) -> Global {
        if let Some((cur, np)) = &self.current {
            if cur == name {
                return Global::Ind(name.to_string(), *np, true);
            }
        }
        if let Some(d) = self.registry.get(name) {
            return Global::Ind(name.to_string(), d.params.len(), false);
        }
        if let Some((ind, idx)) = self.registry.ctor(name) {
            let d = self.registry.get(&ind).expect("constructor of a declared inductive");
            return Global::Ctor(ind.to_string(), idx, d.params.len(), d.ctors[idx].args.len());
        }
        Global::None
    }

    pub fn resolve(&mut self, e: &Expr) -> Result<Term, ParseError> {
        match e {
            Expr::Num(n) => Ok(Term::numeral(*n)),
            Expr::Type(l) => Ok(Term::Univ(l.get())),
            Expr::Unk(l) => Ok(Term::SurfaceUnknown(l.get())),
            Expr::UnkAt(t) => Ok(Term::unknown(self.resolve(t)?)),
            Expr::ErrAt(t) => Ok(Term::err(self.resolve(t)?)),
            Expr::Cast(to, from, t) => Ok(Term::cast(self.resolve(from)?, self.resolve(to)?, self.resolve(t)?)),
            Expr::Pi(x, a, b) => {
                let a = self.resolve(a)?;
                let b = self.with(std::slice::from_ref(x), |s| s.resolve(b))?;
                Ok(Term::Pi(Hint::new(x), Arc::new(a), Arc::new(b)))
            }
            Expr::Lam(x, a, b) => {
                let a = self.resolve(a)?;
                let b = self.with(std::slice::from_ref(x), |s| s.resolve(b))?;
                Ok(Term::Lam(Hint::new(x), Arc::new(a), Arc::new(b)))
            }
            Expr::Ascribe(t, ty) => {
                let t = self.resolve(t)?;
                let ty = self.resolve(ty)?;
                Ok(ascribe(t, ty))
            }
            Expr::App(..) | Expr::Ident(..) => self.spine(e),
            Expr::Match(m) => self.resolve_match(m),
            Expr::VecTy(l, a, n) => Ok(Term::vec_ty(l.get(), self.resolve(a)?, self.resolve(n)?)),
            Expr::Nil(u, l, a) => Ok(Term::nil(*u, l.get(), self.resolve(a)?)),
            Expr::Cons(u, l, parts) => {
                let [a, x, n, v] = &**parts;
                Ok(Term::cons(*u, l.get(), self.resolve(a)?, self.resolve(x)?, self.resolve(n)?, self.resolve(v)?))
            }
            Expr::VecRect(r) => {
                let scrutinee = self.resolve(&r.scrutinee)?;
                let motive = self.with(&r.motive_names, |s| s.resolve(&r.motive))?;
                let nil_case = self.resolve(&r.nil_case)?;
                let cons_case = self.with(&r.cons_names, |s| s.resolve(&r.cons_case))?;
                Ok(Term::VecRect(Arc::new(VecRect {
                    scrutinee,
                    motive_hints: r.motive_names.clone().map(|n| Hint::new(&n)),
                    motive,
                    nil_case,
                    cons_hints: r.cons_names.clone().map(|n| Hint::new(&n)),
                    cons_case,
                })))
            }
        }
    }

    fn spine(&mut self, e: &Expr) -> Result<Term, ParseError> {
        let mut args = Vec::new();
        let mut h = e;
        while let Expr::App(f, a) = h {
            args.push(&**a);
            h = f;
        }
        args.reverse();
        let Expr::Ident(name, lvl, span) = h else {
            let f = self.resolve(h)?;
            return args.into_iter().try_fold(f, |f, a| Ok(Term::app(f, self.resolve(a)?)));
        };
        if let Some(k) = self.var(name) {
            if lvl.is_some() {
                return perr(*span, format!("variable `{name}` cannot take a level"));
            }
            return args.into_iter().try_fold(Term::Var(k), |f, a| Ok(Term::app(f, self.resolve(a)?)));
        }
        if let Some(d) = self.defs.get(name) {
            if lvl.is_some() {
                return perr(*span, format!("definition `{name}` cannot take a level"));
            }
            let d = d.clone();
            return args.into_iter().try_fold(d, |f, a| Ok(Term::app(f, self.resolve(a)?)));
        }
        let mut resolved = Vec::with_capacity(args.len());
        for a in &args {
            resolved.push(self.resolve(a)?);
        }
        match self.global(name) {
            Global::Ind(ind, np, recursive) => {
                if resolved.len() < np {
                    return perr(*span, format!("`{name}` expects {np} parameters, got {}", resolved.len()));
                }
                let rest = resolved.split_off(np);
                let level = match lvl {
                    Some(l) => l.get(),
                    None if recursive => LEVEL_VAR,
                    None => 0,
                };
                Ok(Term::apps(Term::ind(&ind, level, resolved), rest))
            }
            Global::Ctor(ind, idx, np, na) => {
                if resolved.len() < np + na {
                    return perr(
                        *span,
                        format!("constructor `{name}` expects {} arguments, got {}", np + na, resolved.len()),
                    );
                }
                let rest = resolved.split_off(np + na);
                let cargs = resolved.split_off(np);
                let level = lvl.map_or(0, |l| l.get());
                Ok(Term::apps(Term::ctor(&ind, idx, level, resolved, cargs), rest))
            }
            Global::None => perr(*span, format!("unbound name `{name}`")),
        }
    }

    fn resolve_match(&mut self, m: &MatchExpr) -> Result<Term, ParseError> {
        let ind = match (&m.ind, m.branches.first()) {
            (Some(i), _) => i.clone(),
            (None, Some(b)) => match self.registry.ctor(&b.ctor) {
                Some((i, _)) => i.to_string(),
                None => return perr(b.span, format!("`{}` is not a constructor", b.ctor)),
            },
            (None, None) => return perr(m.span, "a match without branches needs `in I`"),
        };
        let Some(decl) = self.registry.get(&ind) else {
            return perr(m.span, format!("unknown inductive `{ind}`"));
        };
        let scrutinee = self.resolve(&m.scrutinee)?;
        let as_name = m.as_name.clone().unwrap_or_else(|| "_".into());
        let motive = self.with(std::slice::from_ref(&as_name), |s| s.resolve(&m.motive))?;
        let fix = m.fix.clone().unwrap_or_else(|| "_".into());
        let mut slots: Vec<Option<Branch>> = vec![None; decl.ctors.len()];
        for b in &m.branches {
            let Some(idx) = decl.ctors.iter().position(|c| *c.name == *b.ctor) else {
                return perr(b.span, format!("`{}` is not a constructor of `{ind}`", b.ctor));
            };
            let arity = decl.ctors[idx].args.len();
            if b.vars.len() != arity {
                return perr(b.span, format!("`{}` binds {arity} arguments, got {}", b.ctor, b.vars.len()));
            }
            if slots[idx].is_some() {
                return perr(b.span, format!("duplicate branch for `{}`", b.ctor));
            }
            let mut names = vec![fix.clone()];
            names.extend(b.vars.iter().cloned());
            let body = self.with(&names, |s| s.resolve(&b.body))?;
            slots[idx] = Some(Branch { hints: b.vars.iter().map(|v| Hint::new(v)).collect(), body });
        }
        let mut branches = Vec::with_capacity(slots.len());
        for (idx, s) in slots.into_iter().enumerate() {
            match s {
                Some(b) => branches.push(b),
                None => return perr(m.span, format!("missing branch for `{}`", decl.ctors[idx].name)),
            }
        }
        Ok(Term::Match(Arc::new(Match {
            ind: Arc::from(ind.as_str()),
            scrutinee,
            as_hint: Hint::new(&as_name),
            motive,
            fix_hint: Hint::new(&fix),
            branches,
        })))
    }

    /// Resolves a declaration into registry form.
    pub fn resolve_inductive(&mut self, d: &IndDecl) -> Result<Inductive, ParseError> {
        self.current = Some((d.name.clone(), d.params.len()));
        let r = self.resolve_inductive_inner(d);
        self.current = None;
        r
    }

    fn resolve_inductive_inner(&mut self, d: &IndDecl) -> Result<Inductive, ParseError> {
        let mut params = Vec::new();
        let mut names = Vec::new();
        for (x, ty) in &d.params {
            let t = self.with(&names, |s| s.resolve(ty))?;
            params.push((Hint::new(x), t));
            names.push(x.clone());
        }
        let mut ctors = Vec::new();
        for (c, ty) in &d.ctors {
            let mut cnames = names.clone();
            let mut cargs = Vec::new();
            let mut t = ty.as_ref();
            while let Some(Expr::Pi(x, a, b)) = t {
                let a = self.with(&cnames, |s| s.resolve(a))?;
                cargs.push((Hint::new(x), a));
                cnames.push(x.clone());
                t = Some(b);
            }
            if let Some(concl) = t {
                if !is_conclusion(concl, &d.name, &names) {
                    return perr(
                        d.span,
                        format!("constructor `{c}` must end in `{}` applied to its parameters", d.name),
                    );
                }
                // shadowing a parameter would make the conclusion mean something else
                if cnames[names.len()..].iter().any(|x| names.contains(x)) {
                    return perr(d.span, format!("constructor `{c}` rebinds a parameter name"));
                }
            }
            ctors.push(CtorDecl { name: Arc::from(c.as_str()), args: cargs });
        }
        Ok(Inductive { name: Arc::from(d.name.as_str()), params, ctors })
    }
}

fn is_conclusion(e: &Expr, ind: &str, params: &[String]) -> bool {
    let mut args = Vec::new();
    let mut h = e;
    while let Expr::App(f, a) = h {
        args.push(&**a);
        h = f;
    }
    args.reverse();
    matches!(h, Expr::Ident(n, _, _) if n == ind)
        && args.len() == params.len()
        && args.iter().zip(params).all(|(a, p)| matches!(a, Expr::Ident(n, None, _) if n == p))
}

enum Global {
    Ind(String, usize, bool),
    Ctor(String, usize, usize, usize),
    None,
}

/// `t :: T`, encoded as the application of the identity at `T`.
pub fn ascribe(t: Term, ty: Term) -> Term {
    Term::app(Term::lam("x", ty, Term::Var(0)), t)
}

/// Parses and resolves a closed term.
pub fn parse_term(src: &str, registry: &Registry, defs: &HashMap<String, Term>) -> Result<Term, ParseError> {
    let e = parse_expr(src)?;
    Scope::new(registry, defs).resolve(&e)
}
