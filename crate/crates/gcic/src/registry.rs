//! Parametrised inductive declarations.
//!
//! Telescopes are stored as level-generic templates: a level `LEVEL_VAR + k`
//! stands for `i + k` where `i` is the level the inductive is used at.

use crate::syntax::{Hint, Level, Name, Term, LEVEL_VAR};
use std::collections::HashMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Clone, Debug)]
pub struct CtorDecl {
    pub name: Name,
    /// Each argument type is scoped over the parameters, then the previous arguments.
    pub args: Vec<(Hint, Term)>,
}

#[derive(Clone, Debug)]
pub struct Inductive {
    pub name: Name,
    /// Each parameter type is scoped over the previous parameters.
    pub params: Vec<(Hint, Term)>,
    pub ctors: Vec<CtorDecl>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RegistryError {
    #[error("`{0}` is already declared")]
    Duplicate(String),
    #[error("`{ind}` occurs non strictly-positively in constructor `{ctor}`")]
    Positivity { ind: String, ctor: String },
    #[error("parameter {index} of `{ind}` refers to a variable that is not an earlier parameter")]
    ParamScope { ind: String, index: usize },
    #[error("argument {index} of constructor `{ctor}` is not well scoped")]
    ArgScope { ctor: String, index: usize },
    #[error("unknown inductive `{0}`")]
    Unknown(String),
    #[error("`{ind}` expects {expected} parameters, got {got}")]
    Arity { ind: String, expected: usize, got: usize },
}

#[derive(Clone, Debug, Default)]
pub struct Registry {
    inds: Vec<Arc<Inductive>>,
    by_name: HashMap<Name, usize>,
    ctors: HashMap<Name, (Name, usize)>,
}

fn at_level(t: &Term, i: Level) -> Term {
    t.map_levels(&|l| if l >= LEVEL_VAR { l - LEVEL_VAR + i } else { l })
}

impl Registry {
    pub fn new() -> Registry {
        Registry::default()
    }

    pub fn get(&self, name: &str) -> Option<&Inductive> {
        self.by_name.get(name).map(|&k| &*self.inds[k])
    }

    pub fn inductives(&self) -> impl Iterator<Item = &Inductive> {
        self.inds.iter().map(|i| &**i)
    }

    /// Inductive and index of a constructor name.
    pub fn ctor(&self, name: &str) -> Option<(Name, usize)> {
        self.ctors.get(name).cloned()
    }

    pub fn ctor_decl(&self, ind: &str, idx: usize) -> Option<&CtorDecl> {
        self.get(ind).and_then(|i| i.ctors.get(idx))
    }

    /// Admits a declaration after checking scoping and strict positivity.
    pub fn declare(&mut self, ind: Inductive) -> Result<(), RegistryError> {
        let name = ind.name.to_string();
        if self.by_name.contains_key(&*ind.name) || self.ctors.contains_key(&*ind.name) {
            return Err(RegistryError::Duplicate(name));
        }
        for (k, (_, ty)) in ind.params.iter().enumerate() {
            if !ty.well_scoped(k) {
                return Err(RegistryError::ParamScope { ind: name, index: k });
            }
            if mentions_ind(ty, &ind.name) {
                return Err(RegistryError::Positivity { ind: name, ctor: format!("parameter {k}") });
            }
        }
        let np = ind.params.len();
        for c in &ind.ctors {
            if self.by_name.contains_key(&*c.name)
                || self.ctors.contains_key(&*c.name)
                || *c.name == *ind.name
                || ind.ctors.iter().filter(|d| d.name == c.name).count() > 1
            {
                return Err(RegistryError::Duplicate(c.name.to_string()));
            }
            for (m, (_, ty)) in c.args.iter().enumerate() {
                if !ty.well_scoped(np + m) {
                    return Err(RegistryError::ArgScope { ctor: c.name.to_string(), index: m });
                }
                if !strictly_positive(ty, &ind.name) {
                    return Err(RegistryError::Positivity { ind: name, ctor: c.name.to_string() });
                }
            }
        }
        let k = self.inds.len();
        for (idx, c) in ind.ctors.iter().enumerate() {
            self.ctors.insert(c.name.clone(), (ind.name.clone(), idx));
        }
        self.by_name.insert(ind.name.clone(), k);
        self.inds.push(Arc::new(ind));
        Ok(())
    }

    fn lookup(&self, ind: &str) -> Result<&Inductive, RegistryError> {
        self.get(ind).ok_or_else(|| RegistryError::Unknown(ind.to_string()))
    }

    /// `Params(I,i)[a]`: the types of the first `|a| + 1` parameters (all of
    /// them once `a` is complete), each instantiated with the earlier values.
    pub fn instantiate_params(&self, ind: &str, i: Level, a: &[Term]) -> Result<Vec<Term>, RegistryError> {
        let d = self.lookup(ind)?;
        if a.len() > d.params.len() {
            return Err(RegistryError::Arity { ind: ind.to_string(), expected: d.params.len(), got: a.len() });
        }
        let upto = (a.len() + 1).min(d.params.len());
        Ok(d.params[..upto].iter().enumerate().map(|(k, (_, ty))| at_level(ty, i).instantiate(&a[..k])).collect())
    }

    /// `Args(I,i,c)[a,b]`: the argument types of constructor `c`, the
    /// `m`-th instantiated with the parameters and the first `m` of `b`.
    /// `b` may be shorter than the telescope, in which case only the
    /// instantiable prefix is returned.
    pub fn instantiate_args(
        &self,
        ind: &str,
        i: Level,
        ctor: usize,
        a: &[Term],
        b: &[Term],
    ) -> Result<Vec<Term>, RegistryError> {
        let d = self.lookup(ind)?;
        if a.len() != d.params.len() {
            return Err(RegistryError::Arity { ind: ind.to_string(), expected: d.params.len(), got: a.len() });
        }
        let c = d.ctors.get(ctor).ok_or_else(|| RegistryError::Unknown(format!("{ind}#{ctor}")))?;
        let upto = (b.len() + 1).min(c.args.len());
        Ok(c.args[..upto]
            .iter()
            .enumerate()
            .map(|(m, (_, ty))| {
                let mut vals: Vec<Term> = a.to_vec();
                vals.extend_from_slice(&b[..m]);
                at_level(ty, i).instantiate(&vals)
            })
            .collect())
    }

    /// Raw argument telescope at level `i`, scoped over the parameters.
    pub fn arg_telescope(&self, ind: &str, i: Level, ctor: usize) -> Result<Vec<(Hint, Term)>, RegistryError> {
        let d = self.lookup(ind)?;
        let c = d.ctors.get(ctor).ok_or_else(|| RegistryError::Unknown(format!("{ind}#{ctor}")))?;
        Ok(c.args.iter().map(|(h, t)| (h.clone(), at_level(t, i))).collect())
    }

    /// Raw parameter telescope at level `i`.
    pub fn param_telescope(&self, ind: &str, i: Level) -> Result<Vec<(Hint, Term)>, RegistryError> {
        let d = self.lookup(ind)?;
        Ok(d.params.iter().map(|(h, t)| (h.clone(), at_level(t, i))).collect())
    }

    /// Whether the declaration's telescopes mention the level it is used at,
    /// recursive occurrences aside. Other inductives live at one level and
    /// are their own germ everywhere.
    pub fn is_level_generic(&self, ind: &str) -> bool {
        let Some(d) = self.get(ind) else { return false };
        let generic = |t: &Term| {
            t.any(&|s| match s {
                Term::Univ(l) | Term::Vec(l, ..) => *l >= LEVEL_VAR,
                Term::Ind(i) => i.level >= LEVEL_VAR && &*i.name != ind,
                Term::Ctor(c) => c.level >= LEVEL_VAR && &*c.ind != ind,
                _ => false,
            })
        };
        d.params.iter().chain(d.ctors.iter().flat_map(|c| c.args.iter())).any(|(_, t)| generic(t))
    }

    /// Parameters of the germ: each is `?` at its instantiated type.
    pub fn germ_params(&self, ind: &str, i: Level) -> Option<Vec<Term>> {
        let d = self.get(ind)?;
        let mut vals: Vec<Term> = Vec::with_capacity(d.params.len());
        for (_, ty) in &d.params {
            let t = at_level(ty, i).instantiate(&vals);
            vals.push(Term::unknown(t));
        }
        Some(vals)
    }
}

fn mentions_ind(t: &Term, name: &str) -> bool {
    t.any(&|s| matches!(s, Term::Ind(i) if &*i.name == name))
}

/// `name` only occurs as the conclusion of a Π telescope, applied to
/// parameters that do not mention it.
fn strictly_positive(ty: &Term, name: &str) -> bool {
    let mut t = ty;
    while let Term::Pi(_, dom, cod) = t {
        if mentions_ind(dom, name) {
            return false;
        }
        t = cod;
    }
    match t {
        Term::Ind(i) if &*i.name == name => i.params.iter().all(|p| !mentions_ind(p, name)),
        _ => !mentions_ind(t, name),
    }
}
