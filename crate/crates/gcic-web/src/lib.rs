//! Browser playground: elaborate, run and compare programs typed into a page.

use gcic::convert::TriState;
use gcic::precision::{DoubleContext, Precision};
use gcic::print::show;
use gcic::program::{elaborate_guarded, Program};
use gcic::reduce::{normalize, Fuel, Outcome};
use gcic::{Term, Variant};
use wasm_bindgen::prelude::*;

fn setup(src: &str, variant: &str) -> Result<(Program, Variant), String> {
    let v: Variant = variant.parse()?;
    let p = Program::load(src).map_err(|e| e.to_string())?;
    Ok((p, v))
}

fn main_of(p: &Program, v: Variant, fuel: u64) -> Result<(Term, Term), String> {
    let s = p.main().ok_or("the program has no definition or eval")?;
    elaborate_guarded(&p.env(v), s, fuel).map_err(|e| e.render(Some(&p.registry)))
}

/// Elaborated form and type of the program's last item.
#[wasm_bindgen]
pub fn elaborate(src: &str, variant: &str, fuel: u32) -> String {
    let fuel = u64::from(fuel);
    let run = || -> Result<String, String> {
        let (p, v) = setup(src, variant)?;
        let (t, ty) = main_of(&p, v, fuel)?;
        Ok(format!("{}\n  : {}", show(&t, Some(&p.registry)), show(&ty, Some(&p.registry))))
    };
    run().unwrap_or_else(|e| format!("error: {e}"))
}

/// Normal form of every eval, one per line.
#[wasm_bindgen]
pub fn evaluate(src: &str, variant: &str, fuel: u32) -> String {
    let fuel = u64::from(fuel);
    let run = || -> Result<String, String> {
        let (p, v) = setup(src, variant)?;
        let env = p.env(v);
        let mut lines = vec![];
        for s in &p.evals {
            let (t, ty) = elaborate_guarded(&env, s, fuel).map_err(|e| e.render(Some(&p.registry)))?;
            let ty = normalize(&env, &ty, &mut Fuel::new(fuel)).into_term();
            let mut f = Fuel::new(fuel);
            lines.push(match normalize(&env, &t, &mut f) {
                Outcome::Value(r, _) => {
                    format!("{} : {}", show(&r, Some(&p.registry)), show(&ty, Some(&p.registry)))
                }
                Outcome::FuelExhausted(_) => format!("out of fuel after {} steps", f.spent),
            });
        }
        if lines.is_empty() {
            return Err("the program has no eval".into());
        }
        Ok(lines.join("\n"))
    };
    run().unwrap_or_else(|e| format!("error: {e}"))
}

/// Structural precision between the last items of two programs.
#[wasm_bindgen]
pub fn precision(left: &str, right: &str, variant: &str, fuel: u32) -> String {
    let fuel = u64::from(fuel);
    let run = || -> Result<String, String> {
        let (pl, v) = setup(left, variant)?;
        let (pr, _) = setup(right, variant)?;
        let (t, ty) = main_of(&pl, v, fuel)?;
        let (u, uty) = main_of(&pr, v, fuel)?;
        let env = pr.env(v);
        let mut lines = vec![];
        for (what, a, b) in [("term", &t, &u), ("type", &ty, &uty)] {
            let mut checker = Precision::new(&env, fuel);
            let r = checker.alpha(&mut DoubleContext::new(), a, b);
            lines.push(format!("{what}: {r:?}"));
            if let Some(bl) = checker.blame().filter(|_| r == TriState::No) {
                let names: Vec<String> = bl.names.iter().map(|n| n.to_string()).collect();
                let l = gcic::print::show_in(&bl.left, Some(&pr.registry), &names);
                let rr = gcic::print::show_in(&bl.right, Some(&pr.registry), &names);
                lines.push(format!("  blame {}: {l} against {rr}", bl.rule));
            }
        }
        Ok(lines.join("\n"))
    };
    run().unwrap_or_else(|e| format!("error: {e}"))
}
