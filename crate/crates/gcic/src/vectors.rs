//! Length-indexed vectors: the extra canonical forms `nil?`/`cons?`, the
//! cast rules between vector types and the recursor rules.

use crate::reduce::Rule;
use crate::syntax::{Cons, Nil, Term, VecRect, NAT};
use std::sync::Arc;

/// Shape of a vector index in weak-head normal form.
#[derive(Clone, Debug, PartialEq)]
pub enum Index<'a> {
    Zero,
    Succ(&'a Term),
    Unk,
    Err,
}

pub fn index_shape(n: &Term) -> Option<Index<'_>> {
    match n {
        Term::Ctor(c) if &*c.ind == NAT && c.idx == 0 => Some(Index::Zero),
        Term::Ctor(c) if &*c.ind == NAT && c.idx == 1 && c.args.len() == 1 => Some(Index::Succ(&c.args[0])),
        Term::Unknown(a) if matches!(&**a, Term::Ind(i) if &*i.name == NAT) => Some(Index::Unk),
        Term::Err(a) if matches!(&**a, Term::Ind(i) if &*i.name == NAT) => Some(Index::Err),
        _ => None,
    }
}

pub fn unk_nat() -> Term {
    Term::unknown(Term::nat())
}

fn is_vec_exc(v: &Term) -> Option<bool> {
    match v {
        Term::Unknown(a) if matches!(&**a, Term::Vec(..)) => Some(true),
        Term::Err(a) if matches!(&**a, Term::Vec(..)) => Some(false),
        _ => None,
    }
}

/// Cast of `v` from `src` to `tgt`, both syntactically vector types.
pub fn cast_rule(src: &Term, tgt: &Term, v: &Term) -> Option<(Term, Rule)> {
    let (Term::Vec(_, _, n), Term::Vec(lb, eb, m)) = (src, tgt) else { return None };
    let n_shape = index_shape(n)?;
    let m_shape = index_shape(m)?;
    let eb: &Term = eb;
    let lb = *lb;
    let err = || Term::err(tgt.clone());
    match is_vec_exc(v) {
        Some(true) => return Some((Term::unknown(tgt.clone()), Rule::VUnk)),
        Some(false) => return Some((err(), Rule::VErr)),
        None => {}
    }
    if m_shape == Index::Err {
        return Some((err(), Rule::VToErr));
    }
    let tail_cast = |c: &Cons, from_len: &Term, to_len: &Term| {
        Term::cast(
            Term::vec_ty(c.level, c.elem.clone(), from_len.clone()),
            Term::vec_ty(lb, eb.clone(), to_len.clone()),
            c.tail.clone(),
        )
    };
    let head_cast = |c: &Cons| Term::cast(c.elem.clone(), eb.clone(), c.head.clone());
    match v {
        Term::Nil(nl) if !nl.unk => {
            if n_shape != Index::Zero {
                return None;
            }
            Some(match m_shape {
                Index::Zero => (Term::nil(false, lb, eb.clone()), Rule::VNil),
                Index::Succ(_) => (err(), Rule::VNilCons),
                Index::Unk => (Term::nil(true, lb, eb.clone()), Rule::VNilUnk),
                Index::Err => unreachable!(),
            })
        }
        Term::Cons(c) if !c.unk => {
            let Index::Succ(n_pred) = n_shape else { return None };
            Some(match m_shape {
                Index::Succ(m_pred) => (
                    Term::cons(false, lb, eb.clone(), head_cast(c), m_pred.clone(), tail_cast(c, &c.len, m_pred)),
                    Rule::VCons,
                ),
                Index::Zero => (err(), Rule::VConsNil),
                Index::Unk => (
                    Term::cons(true, lb, eb.clone(), head_cast(c), n_pred.clone(), tail_cast(c, &c.len, n_pred)),
                    Rule::VConsUnk,
                ),
                Index::Err => unreachable!(),
            })
        }
        Term::Nil(nl) if nl.unk => {
            if n_shape != Index::Unk {
                return None;
            }
            Some(match m_shape {
                Index::Unk => (Term::nil(true, lb, eb.clone()), Rule::VNilu),
                Index::Zero => (Term::nil(false, lb, eb.clone()), Rule::VNiluNil),
                Index::Succ(_) => (err(), Rule::VNiluCons),
                Index::Err => unreachable!(),
            })
        }
        Term::Cons(c) if c.unk => {
            if n_shape != Index::Unk {
                return None;
            }
            Some(match m_shape {
                Index::Unk => (
                    Term::cons(true, lb, eb.clone(), head_cast(c), c.len.clone(), tail_cast(c, &c.len, &c.len)),
                    Rule::VConsu,
                ),
                Index::Zero => (err(), Rule::VConsuNil),
                Index::Succ(m_pred) => (
                    Term::cons(false, lb, eb.clone(), head_cast(c), m_pred.clone(), tail_cast(c, &c.len, m_pred)),
                    Rule::VConsuCons,
                ),
                Index::Err => unreachable!(),
            })
        }
        _ => None,
    }
}

fn with_scrutinee(r: &VecRect, s: Term) -> Term {
    Term::VecRect(Arc::new(VecRect { scrutinee: s, ..r.clone() }))
}

/// The motive at index `n` and vector `v`.
pub fn motive_at(r: &VecRect, n: &Term, v: &Term) -> Term {
    r.motive.instantiate(&[n.clone(), v.clone()])
}

/// Recursor applied to the syntactic scrutinee `r.scrutinee`.
pub fn rect_rule(r: &VecRect) -> Option<(Term, Rule)> {
    let s = &r.scrutinee;
    match s {
        Term::Nil(nl) if !nl.unk => Some((r.nil_case.clone(), Rule::RectNil)),
        Term::Cons(c) if !c.unk => {
            let ih = with_scrutinee(r, c.tail.clone());
            Some((r.cons_case.instantiate(&[c.head.clone(), c.len.clone(), c.tail.clone(), ih]), Rule::RectCons))
        }
        Term::Err(a) | Term::Unknown(a) => {
            let Term::Vec(_, _, n) = &**a else { return None };
            let ty = motive_at(r, n, s);
            if matches!(s, Term::Err(_)) {
                Some((Term::err(ty), Rule::RectErr))
            } else {
                Some((Term::unknown(ty), Rule::RectUnk))
            }
        }
        Term::Nil(nl) => {
            let plain = Term::Nil(Arc::new(Nil { unk: false, ..(**nl).clone() }));
            let from = motive_at(r, &Term::zero(), &plain);
            let to = motive_at(r, &unk_nat(), s);
            Some((Term::cast(from, to, with_scrutinee(r, plain)), Rule::RectNilu))
        }
        Term::Cons(c) => {
            let plain = Term::Cons(Arc::new(Cons { unk: false, ..(**c).clone() }));
            let from = motive_at(r, &Term::succ(c.len.clone()), &plain);
            let to = motive_at(r, &unk_nat(), s);
            Some((Term::cast(from, to, with_scrutinee(r, plain)), Rule::RectConsu))
        }
        _ => None,
    }
}
