//! Whole programs: inductive declarations, definitions and `eval` requests,
//! loaded on top of the built-in prelude.

use crate::elab::Elaborator;
use crate::env::{Env, Variant};
use crate::guard;
use crate::parse::{ascribe, parse_expr, parse_items, Item, ParseError, Scope, Span};
use crate::reduce::{whnf, Fuel, Outcome};
use crate::registry::{Inductive, Registry, RegistryError};
use crate::syntax::{Context, Level, Term, LEVEL_VAR};
use crate::typing::{ErrorKind, TResult, TypeError, Typer};
use std::collections::HashMap;
use std::sync::{Arc, OnceLock};
use thiserror::Error;

pub const PRELUDE: &str = include_str!("../prelude/prelude.gcic");

#[derive(Clone, Debug, Error)]
pub enum LoadError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{span}: {err}")]
    Registry { span: Span, err: RegistryError },
    #[error("duplicate definition `{0}`")]
    Duplicate(String),
}

#[derive(Clone, Debug)]
pub struct Def {
    pub name: String,
    /// The body, ascribed with the declared type if there is one.
    pub source: Term,
}

#[derive(Clone, Debug)]
pub struct Program {
    pub registry: Arc<Registry>,
    pub defs: Vec<Def>,
    pub evals: Vec<Term>,
    by_name: HashMap<String, Term>,
    /// Number of inductives that come from the prelude.
    prelude_len: usize,
}

impl Program {
    /// The prelude alone.
    pub fn prelude() -> &'static Program {
        static P: OnceLock<Program> = OnceLock::new();
        P.get_or_init(|| {
            let empty = Program {
                registry: Arc::new(Registry::new()),
                defs: vec![],
                evals: vec![],
                by_name: HashMap::new(),
                prelude_len: 0,
            };
            let mut p = empty.extend(PRELUDE).expect("prelude loads");
            p.prelude_len = p.registry.inductives().count();
            p
        })
    }

    /// Parses `src` after the prelude.
    pub fn load(src: &str) -> Result<Program, LoadError> {
        Program::prelude().extend(src)
    }

    /// Adds the items of `src` to this program.
    pub fn extend(&self, src: &str) -> Result<Program, LoadError> {
        let items = parse_items(src)?;
        let mut registry = (*self.registry).clone();
        let mut by_name = self.by_name.clone();
        let mut defs = self.defs.clone();
        let mut evals = self.evals.clone();
        for item in items {
            match item {
                Item::Inductive(d) => {
                    let ind = Scope::new(&registry, &by_name).resolve_inductive(&d)?;
                    registry.declare(ind).map_err(|err| LoadError::Registry { span: d.span, err })?;
                }
                Item::Def { name, ty, body, .. } => {
                    if by_name.contains_key(&name) {
                        return Err(LoadError::Duplicate(name));
                    }
                    let mut scope = Scope::new(&registry, &by_name);
                    let body = scope.resolve(&body)?;
                    let source = match ty {
                        Some(ty) => ascribe(body, scope.resolve(&ty)?),
                        None => body,
                    };
                    by_name.insert(name.clone(), source.clone());
                    defs.push(Def { name, source });
                }
                Item::Eval(e) => evals.push(Scope::new(&registry, &by_name).resolve(&e)?),
            }
        }
        Ok(Program { registry: Arc::new(registry), defs, evals, by_name, prelude_len: self.prelude_len })
    }

    pub fn env(&self, variant: Variant) -> Env {
        Env::new(variant, self.registry.clone())
    }

    pub fn def(&self, name: &str) -> Option<&Term> {
        self.by_name.get(name)
    }

    /// Resolves a single expression against this program's names.
    pub fn term(&self, src: &str) -> Result<Term, ParseError> {
        Scope::new(&self.registry, &self.by_name).resolve(&parse_expr(src)?)
    }

    /// What running the program means: the last `eval`, else the last definition.
    pub fn main(&self) -> Option<&Term> {
        self.evals.last().or_else(|| self.defs.last().map(|d| &d.source))
    }

    /// Inductives declared by the program itself, not the prelude.
    pub fn own_inductives(&self) -> impl Iterator<Item = &Inductive> {
        self.registry.inductives().skip(self.prelude_len)
    }

    /// Checks every declared inductive, then elaborates every definition and
    /// `eval` item. Returns the elaborated main term and its type, if any.
    pub fn check(&self, env: &Env, fuel: u64) -> TResult<Option<(Term, Term)>> {
        for ind in self.own_inductives() {
            check_inductive(env, ind, fuel)?;
        }
        let mut last = None;
        for s in self.defs.iter().map(|d| &d.source).chain(&self.evals) {
            last = Some(elaborate_guarded(env, s, fuel)?);
        }
        Ok(last)
    }
}

/// Elaborates a closed source term and checks the guard condition on the result.
pub fn elaborate_guarded(env: &Env, s: &Term, fuel: u64) -> TResult<(Term, Term)> {
    let (t, ty) = Elaborator::new(env, fuel).infer(&mut Context::new(), s)?;
    guard::check(&env.registry, &t, 0)
        .map_err(|msg| TypeError::new("Guard", &Context::new(), &t, ErrorKind::Guard(msg)))?;
    Ok((t, ty))
}

/// Highest level at which declarations are tried.
const MAX_DECL_LEVEL: Level = 3;

/// An inductive is well formed when, at some level `i`, its parameter types
/// are types and every constructor argument is a type of level at most `i`.
pub fn check_inductive(env: &Env, ind: &Inductive, fuel: u64) -> TResult<()> {
    let mut first = None;
    for i in 0..=MAX_DECL_LEVEL {
        match check_inductive_at(env, ind, i, fuel) {
            Ok(()) => return Ok(()),
            Err(e) => {
                first.get_or_insert(e);
            }
        }
    }
    Err(first.expect("at least one level tried"))
}

fn check_inductive_at(env: &Env, ind: &Inductive, i: Level, fuel: u64) -> TResult<()> {
    let at = |t: &Term| t.map_levels(&|l| if l >= LEVEL_VAR { l - LEVEL_VAR + i } else { l });
    let mut typer = Typer::new(env, fuel);
    let mut ctx = Context::new();
    for (h, ty) in &ind.params {
        let ty = at(ty);
        typer.sort(&mut ctx, &ty)?;
        ctx.push(h.clone(), ty);
    }
    for c in &ind.ctors {
        let mut cx = ctx.clone();
        for (h, ty) in &c.args {
            let ty = at(ty);
            let j = typer.sort(&mut cx, &ty)?;
            if j > i {
                return Err(TypeError::new("Ind-Decl", &cx, &ty, ErrorKind::LevelMismatch { expected: i, found: j }));
            }
            cx.push(h.clone(), ty);
        }
    }
    Ok(())
}

/// Result of running a closed term.
#[derive(Clone, Debug)]
pub struct Run {
    pub elaborated: Term,
    pub ty: Term,
    pub outcome: Outcome,
    pub steps: u64,
}

/// Elaborates `s` and reduces the result to weak-head normal form.
pub fn run(env: &Env, s: &Term, fuel: u64) -> TResult<Run> {
    let (elaborated, ty) = elaborate_guarded(env, s, fuel)?;
    let mut f = Fuel::new(fuel);
    let outcome = whnf(env, &elaborated, &mut f);
    Ok(Run { elaborated, ty, outcome, steps: f.spent })
}
