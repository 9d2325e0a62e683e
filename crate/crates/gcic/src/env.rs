//! Variant parameters, heads and germs.

use crate::registry::Registry;
use crate::syntax::{Level, Name, Term};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// Name of the hard-wired vector type when it is seen as a head.
pub const VEC: &str = "vec";

/// Choice of universe parameters for Π types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// `s(i,j) = max(i,j)`, `c(i) = i`
    Grad,
    /// `s(i,j) = max(i,j)`, `c(i) = i - 1`
    Norm,
    /// `s(i,j) = max(i,j) + 1`, `c(i) = i - 1`
    Shift,
}

pub const VARIANTS: [Variant; 3] = [Variant::Grad, Variant::Norm, Variant::Shift];

impl Variant {
    /// Level of `Π x:A.B` with `A : □j` and `B : □i`.
    pub fn sort_of_pi(self, i: Level, j: Level) -> Level {
        match self {
            Variant::Grad | Variant::Norm => i.max(j),
            Variant::Shift => i.max(j) + 1,
        }
    }

    /// Level of the domain and codomain of the Π germ at level `i`;
    /// `None` is the below-zero marker.
    pub fn cast_of_pi(self, i: Level) -> Option<Level> {
        match self {
            Variant::Grad => Some(i),
            Variant::Norm | Variant::Shift => i.checked_sub(1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Grad => "grad",
            Variant::Norm => "norm",
            Variant::Shift => "shift",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Variant, String> {
        match s {
            "grad" => Ok(Variant::Grad),
            "norm" => Ok(Variant::Norm),
            "shift" => Ok(Variant::Shift),
            _ => Err(format!("unknown variant `{s}` (expected grad, norm or shift)")),
        }
    }
}

/// Everything the judgements need besides the term: the variant and the
/// inductive declarations.
#[derive(Clone, Debug)]
pub struct Env {
    pub variant: Variant,
    pub registry: Arc<Registry>,
}

impl Env {
    pub fn new(variant: Variant, registry: Arc<Registry>) -> Env {
        Env { variant, registry }
    }

    pub fn with_variant(&self, variant: Variant) -> Env {
        Env { variant, registry: self.registry.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Head {
    Univ(Level),
    Pi,
    Ind(Name),
}

impl fmt::Display for Head {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Head::Univ(i) => write!(f, "Type@{i}"),
            Head::Pi => f.write_str("forall"),
            Head::Ind(n) => f.write_str(n),
        }
    }
}

/// Head of a syntactic type former, `None` for anything else.
pub fn head_of(t: &Term) -> Option<Head> {
    match t {
        Term::Univ(i) => Some(Head::Univ(*i)),
        Term::Pi(..) => Some(Head::Pi),
        Term::Ind(i) => Some(Head::Ind(i.name.clone())),
        Term::Vec(..) => Some(Head::Ind(Name::from(VEC))),
        _ => None,
    }
}

/// Least precise type with head `h` at level `i`.
pub fn germ(env: &Env, i: Level, h: &Head) -> Term {
    match h {
        Head::Univ(j) if *j < i => Term::Univ(*j),
        Head::Univ(_) => Term::err(Term::Univ(i)),
        Head::Pi => match env.variant.cast_of_pi(i) {
            Some(c) => Term::arrow(Term::unk_univ(c), Term::unk_univ(c)),
            None => Term::err(Term::Univ(i)),
        },
        Head::Ind(n) if &**n == VEC => Term::vec_ty(i, Term::unk_univ(i), Term::unknown(Term::nat())),
        Head::Ind(n) => {
            let params = env.registry.germ_params(n, i).unwrap_or_default();
            let level = if env.registry.is_level_generic(n) { i } else { 0 };
            Term::ind(n, level, params)
        }
    }
}

/// Whether `t` is syntactically `?_{□i}` for some `i`.
pub fn as_unk_univ(t: &Term) -> Option<Level> {
    match t {
        Term::Unknown(a) => match &**a {
            Term::Univ(i) => Some(*i),
            _ => None,
        },
        _ => None,
    }
}

/// Whether `t` is syntactically `err_{□i}` for some `i`.
pub fn as_err_univ(t: &Term) -> Option<Level> {
    match t {
        Term::Err(a) => match &**a {
            Term::Univ(i) => Some(*i),
            _ => None,
        },
        _ => None,
    }
}

/// Whether `a` is `germ_i(h)` for its own head, with a non-error germ.
pub fn is_germ_at(env: &Env, i: Level, a: &Term) -> bool {
    match head_of(a) {
        Some(h) => {
            let g = germ(env, i, &h);
            !matches!(g, Term::Err(_)) && &g == a
        }
        None => false,
    }
}

/// Least `j` with `germ_j(hd a) = a`, read off the shape of `a`.
pub fn min_germ_level(env: &Env, a: &Term) -> Option<Level> {
    let candidate = match a {
        Term::Univ(j) => j + 1,
        Term::Pi(_, dom, _) => {
            let c = as_unk_univ(dom)?;
            match env.variant {
                Variant::Grad => c,
                Variant::Norm | Variant::Shift => c + 1,
            }
        }
        Term::Ind(i) => i.level,
        Term::Vec(l, ..) => *l,
        _ => return None,
    };
    is_germ_at(env, candidate, a).then_some(candidate)
}
