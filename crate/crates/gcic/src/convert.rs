//! Definitional equality of cast-calculus terms, and the consistency
//! relation used by elaboration. Both are decided on weak-head normal forms
//! and report `Unknown` when the reduction budget runs out.

use crate::env::Env;
use crate::reduce::{whnf, Fuel, Outcome};
use crate::syntax::Term;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TriState {
    Yes,
    No,
    Unknown,
}

impl TriState {
    pub fn and(self, other: impl FnOnce() -> TriState) -> TriState {
        match self {
            TriState::No => TriState::No,
            TriState::Yes => other(),
            TriState::Unknown => match other() {
                TriState::No => TriState::No,
                _ => TriState::Unknown,
            },
        }
    }
    pub fn or(self, other: impl FnOnce() -> TriState) -> TriState {
        match self {
            TriState::Yes => TriState::Yes,
            TriState::No => other(),
            TriState::Unknown => match other() {
                TriState::Yes => TriState::Yes,
                _ => TriState::Unknown,
            },
        }
    }
    pub fn is_yes(self) -> bool {
        self == TriState::Yes
    }
}

impl From<bool> for TriState {
    fn from(b: bool) -> TriState {
        if b {
            TriState::Yes
        } else {
            TriState::No
        }
    }
}

fn all_children(a: &Term, b: &Term, mut f: impl FnMut(&Term, &Term) -> TriState) -> TriState {
    let ca = a.children();
    let cb = b.children();
    if ca.len() != cb.len() {
        return TriState::No;
    }
    let mut acc = TriState::Yes;
    for ((_, x), (_, y)) in ca.into_iter().zip(cb) {
        acc = acc.and(|| f(x, y));
        if acc == TriState::No {
            break;
        }
    }
    acc
}

fn head(env: &Env, t: &Term, fuel: &mut Fuel) -> Option<Term> {
    match whnf(env, t, fuel) {
        Outcome::Value(v, _) => Some(v),
        Outcome::FuelExhausted(_) => None,
    }
}

/// `a ≡ b` using at most `fuel` reduction steps overall.
pub fn conv_with(env: &Env, a: &Term, b: &Term, fuel: &mut Fuel) -> TriState {
    if a == b {
        return TriState::Yes;
    }
    let (Some(a), Some(b)) = (head(env, a, fuel), head(env, b, fuel)) else { return TriState::Unknown };
    if a == b {
        return TriState::Yes;
    }
    if !a.same_shape(&b) {
        return TriState::No;
    }
    all_children(&a, &b, |x, y| conv_with(env, x, y, fuel))
}

pub fn conv(env: &Env, a: &Term, b: &Term) -> TriState {
    conv_with(env, a, b, &mut Fuel::default())
}

fn strip_casts(env: &Env, mut t: Term, fuel: &mut Fuel) -> Option<Term> {
    loop {
        match t {
            Term::Cast(_, _, u) => t = head(env, &u, fuel)?,
            _ => return Some(t),
        }
    }
}

/// α-consistency without any reduction: equality up to casts, with `?`
/// standing for anything and `err` related to nothing.
pub fn alpha_consistent(a: &Term, b: &Term) -> bool {
    fn strip(mut t: &Term) -> &Term {
        while let Term::Cast(_, _, u) = t {
            t = u;
        }
        t
    }
    let (a, b) = (strip(a), strip(b));
    match (a, b) {
        (Term::Unknown(_), _) | (_, Term::Unknown(_)) => true,
        (Term::Err(_), _) | (_, Term::Err(_)) => false,
        _ => a.same_shape(b) && a.children().iter().zip(b.children()).all(|((_, x), (_, y))| alpha_consistent(x, y)),
    }
}

/// Consistency: both sides reduce to terms equal up to casts, with `?`
/// standing for anything. The terms are compared before each reduction.
pub fn consistent_with(env: &Env, a: &Term, b: &Term, fuel: &mut Fuel) -> TriState {
    if alpha_consistent(a, b) {
        return TriState::Yes;
    }
    let Some(a) = head(env, a, fuel).and_then(|a| strip_casts(env, a, fuel)) else { return TriState::Unknown };
    if matches!(a, Term::Unknown(_)) {
        return TriState::Yes;
    }
    let Some(b) = head(env, b, fuel).and_then(|b| strip_casts(env, b, fuel)) else { return TriState::Unknown };
    if matches!(b, Term::Unknown(_)) {
        return TriState::Yes;
    }
    // no rule relates an error to anything, itself included
    if matches!(a, Term::Err(_)) || matches!(b, Term::Err(_)) {
        return TriState::No;
    }
    if !a.same_shape(&b) {
        return TriState::No;
    }
    all_children(&a, &b, |x, y| consistent_with(env, x, y, fuel))
}

pub fn consistent(env: &Env, a: &Term, b: &Term) -> TriState {
    consistent_with(env, a, b, &mut Fuel::default())
}
