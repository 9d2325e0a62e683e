//! Syntactic guard condition for the fixpoints fused with `match`.
//!
//! Every occurrence of a recursive function must be applied, and its
//! argument (looking through casts and ascriptions) must be either a
//! variable bound as a recursive constructor argument of the matched value,
//! transitively through nested matches on such variables, or `?`.

use crate::registry::Registry;
use crate::syntax::Term;

/// Binder levels are absolute positions from the root, so they stay valid
/// under further binders.
#[derive(Default, Clone)]
struct Guards {
    /// Level of each enclosing recursive function, with the levels of its
    /// allowed arguments.
    fixes: Vec<(usize, Vec<usize>)>,
}

fn level_of(depth: usize, k: usize) -> Option<usize> {
    depth.checked_sub(k + 1)
}

/// Removes casts and identity ascriptions.
fn strip(t: &Term) -> &Term {
    match t {
        Term::Cast(_, _, u) => strip(u),
        Term::App(f, u) => match &**f {
            Term::Lam(_, _, body) if **body == Term::Var(0) => strip(u),
            _ => t,
        },
        _ => t,
    }
}

fn fix_level(g: &Guards, depth: usize, f: &Term) -> Option<usize> {
    match strip(f) {
        Term::Var(k) => {
            let l = level_of(depth, *k)?;
            g.fixes.iter().any(|(fl, _)| *fl == l).then_some(l)
        }
        _ => None,
    }
}

fn allowed(g: &Guards, fix: usize, depth: usize, arg: &Term) -> bool {
    match strip(arg) {
        Term::Unknown(_) | Term::SurfaceUnknown(_) => true,
        Term::Var(k) => match level_of(depth, *k) {
            Some(l) => g.fixes.iter().any(|(fl, args)| *fl == fix && args.contains(&l)),
            None => false,
        },
        _ => false,
    }
}

/// Checks every fixpoint in `t`, which sits under `depth` binders.
pub fn check(reg: &Registry, t: &Term, depth: usize) -> Result<(), String> {
    walk(reg, &Guards::default(), t, depth)
}

fn walk(reg: &Registry, g: &Guards, t: &Term, depth: usize) -> Result<(), String> {
    match t {
        Term::Var(k) => {
            if let Some(l) = level_of(depth, *k) {
                if g.fixes.iter().any(|(fl, _)| *fl == l) {
                    return Err("a recursive function is used without an argument".into());
                }
            }
            Ok(())
        }
        Term::App(f, u) => {
            if let Some(fl) = fix_level(g, depth, f) {
                if !allowed(g, fl, depth, u) {
                    return Err("recursive call on an argument that is not structurally smaller".into());
                }
                return walk(reg, g, u, depth);
            }
            walk(reg, g, f, depth)?;
            walk(reg, g, u, depth)
        }
        Term::Match(m) => {
            walk(reg, g, &m.scrutinee, depth)?;
            walk(reg, g, &m.motive, depth + 1)?;
            // variables that are smaller than the scrutinee for each enclosing fixpoint
            let scrut_smaller: Vec<usize> = match strip(&m.scrutinee) {
                Term::Var(k) => match level_of(depth, *k) {
                    Some(l) => g.fixes.iter().filter(|(_, args)| args.contains(&l)).map(|(fl, _)| *fl).collect(),
                    None => vec![],
                },
                _ => vec![],
            };
            let decl = reg.get(&m.ind);
            for (idx, b) in m.branches.iter().enumerate() {
                let n = b.hints.len();
                let fix_l = depth;
                let recursive: Vec<usize> = (0..n)
                    .filter(|&a| {
                        decl.and_then(|d| d.ctors.get(idx))
                            .and_then(|c| c.args.get(a))
                            .is_some_and(|(_, ty)| mentions_ind(ty, &m.ind))
                    })
                    .map(|a| depth + 1 + a)
                    .collect();
                let mut g2 = g.clone();
                for (fl, args) in g2.fixes.iter_mut() {
                    if scrut_smaller.contains(fl) {
                        args.extend((0..n).map(|a| depth + 1 + a));
                    }
                }
                g2.fixes.push((fix_l, recursive));
                walk(reg, &g2, &b.body, depth + 1 + n)?;
            }
            Ok(())
        }
        _ => {
            for (d, c) in t.children() {
                walk(reg, g, c, depth + d)?;
            }
            Ok(())
        }
    }
}

fn mentions_ind(t: &Term, name: &str) -> bool {
    t.any(&|s| matches!(s, Term::Ind(i) if &*i.name == name))
}
