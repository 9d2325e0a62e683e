//! Acceptance checks, one PASS/FAIL line per criterion. Runs without the
//! test harness so the lines appear in the output; exits non-zero if any fail.

use gcic::corpus::Typed;
use gcic::precision::{apply_zero_context, dgg_observe, plug, Observation, Refinement};
use gcic::program::{run, Program};
use gcic::reduce::{normalize, Fuel, Outcome};
use gcic::suite::{self, Tally};
use gcic::syntax::alpha_eq;
use gcic::{Env, Term, Variant, VARIANTS};
use std::time::{Duration, Instant};

const FUEL: u64 = 100_000;
/// Fuel for each individual decision inside the property suites.
const SUITE_FUEL: u64 = 10_000;
const ENUM_SIZE: usize = 8;
const GENERATED: usize = 10_000;
const SEED: u64 = 1;
const PAIRS_PER_TERM: usize = 4;
const MONOTONICITY_TYPES: usize = 300;
const OMEGA_STEPS: u64 = 200;
const OMEGA_TIME: Duration = Duration::from_secs(1);
const SUITE_TIME: Duration = Duration::from_secs(600);
const MIN_STATIC: usize = 50;
const MIN_GRADUALITY: usize = 500;

fn load(name: &str) -> Program {
    let src = std::fs::read_to_string(format!("{}/examples/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap();
    Program::load(&src).unwrap()
}

fn nf_of(p: &Program, v: Variant, s: &Term) -> Option<Term> {
    let r = run(&p.env(v), s, FUEL).ok()?;
    normalize(&p.env(v), &r.elaborated, &mut Fuel::new(FUEL)).value()
}

/// Normal forms of every `eval` in the file match the expected sources.
fn evals_match(file: &str, expected: &[&str], notes: &mut Vec<String>) -> bool {
    let p = load(file);
    let mut ok = p.evals.len() == expected.len();
    for v in VARIANTS {
        for (s, want) in p.evals.iter().zip(expected) {
            let want = p.term(want).unwrap();
            match nf_of(&p, v, s) {
                Some(got) if alpha_eq(&got, &want) => {}
                got => {
                    ok = false;
                    let shown = got.map(|g| gcic::print::show(&g, Some(&p.registry)));
                    notes.push(format!("{file} {v}: {shown:?}"));
                }
            }
        }
    }
    ok
}

struct Report {
    lines: Vec<(usize, bool, String)>,
}

impl Report {
    fn line(&mut self, n: usize, ok: bool, detail: String) {
        println!("criterion {n}: {} {detail}", if ok { "PASS" } else { "FAIL" });
        self.lines.push((n, ok, detail));
    }
}

fn tallies(parts: &[(&str, &Tally)]) -> (bool, String) {
    let ok = parts.iter().all(|(_, t)| t.ok());
    let detail = parts.iter().map(|(n, t)| format!("{n} [{t}]")).collect::<Vec<_>>().join("; ");
    for (n, t) in parts {
        for f in t.failures.iter().take(3) {
            println!("    {n}: {f}");
        }
    }
    (ok, detail)
}

fn omega() -> (bool, String) {
    let start = Instant::now();
    let p0 = load("omega0.gcic");
    let p1 = load("omega1.gcic");
    let mut ok = true;
    let mut notes = vec![];
    for v in VARIANTS {
        let elab = run(&p0.env(v), p0.main().unwrap(), 1_000).is_ok();
        if elab != (v == Variant::Grad) {
            ok = false;
            notes.push(format!("level 0 {v}: elaborates = {elab}"));
        }
        match v {
            Variant::Grad => {
                for fuel in [1_000, 10_000, 100_000] {
                    let r = run(&p1.env(v), p1.main().unwrap(), fuel).unwrap();
                    if !r.outcome.is_exhausted() || r.steps < fuel {
                        ok = false;
                        notes.push(format!("grad fuel {fuel}: stopped after {}", r.steps));
                    }
                }
            }
            _ => {
                let r = run(&p1.env(v), p1.main().unwrap(), FUEL).unwrap();
                let good = matches!(&r.outcome, Outcome::Value(t, _) if *t == Term::err(Term::unk_univ(0)));
                if !good || r.steps > OMEGA_STEPS {
                    ok = false;
                    notes.push(format!("{v}: {} steps", r.steps));
                }
            }
        }
    }
    let took = start.elapsed();
    ok &= took < OMEGA_TIME;
    (ok, format!("{took:.2?} {}", notes.join(", ")))
}

struct VariantRun {
    variant: Variant,
    terms: usize,
    progress: Tally,
    subject_reduction: Tally,
    normalization: Tally,
    confluence: Tally,
    catch_up: Tally,
    simulation: Tally,
    monotonicity: Tally,
    dgg: Tally,
    oracle: Tally,
    conservativity: Tally,
    rejected: Vec<String>,
    graduality: Tally,
    graduality_pairs: usize,
}

fn variant_run(v: Variant) -> VariantRun {
    let env: Env = Program::prelude().env(v);
    let corpus: Vec<Typed> = suite::corpus(&env, ENUM_SIZE, GENERATED, SEED);
    let pairs = suite::precision_pairs(&env, &corpus, PAIRS_PER_TERM, SUITE_FUEL);
    let closed: Vec<Term> = corpus.iter().map(|t| t.term.clone()).collect();
    let (conservativity, rejected) = suite::conservativity(&env, FUEL);
    let (graduality, graduality_pairs) = if v == Variant::Norm {
        (Tally::default(), 0)
    } else {
        let sp = suite::source_pairs(&env, &corpus, SUITE_FUEL);
        (suite::graduality(&sp, SUITE_FUEL), sp.len())
    };
    VariantRun {
        variant: v,
        terms: corpus.len(),
        progress: suite::progress(&env, &corpus),
        subject_reduction: suite::subject_reduction(&env, &corpus, SUITE_FUEL),
        normalization: suite::normalization(&env, &corpus, FUEL),
        confluence: suite::confluence(&env, &corpus, SUITE_FUEL),
        catch_up: suite::catch_up_suite(&env, &pairs, SUITE_FUEL),
        simulation: suite::simulation(&env, &pairs, SUITE_FUEL),
        monotonicity: suite::monotonicity(&env, &pairs, MONOTONICITY_TYPES, SUITE_FUEL),
        dgg: suite::dgg(&env, &pairs, SUITE_FUEL),
        oracle: suite::oracle(&env, &closed, FUEL, v != Variant::Grad),
        conservativity,
        rejected,
        graduality,
        graduality_pairs,
    }
}

/// The documented norm counterexample to the dynamic gradual guarantee.
fn norm_dgg_counterexample() -> bool {
    let p = Program::prelude();
    let env = p.env(Variant::Norm);
    let lam = p.term("fun (x : nat) => S x").unwrap();
    let round = p.term("<nat -> nat <= ?[Type@0]> <?[Type@0] <= nat -> nat> (fun (x : nat) => S x)").unwrap();
    let c = apply_zero_context();
    dgg_observe(&env, &plug(&c, &lam), &plug(&c, &round), FUEL)
        == Refinement::Violation { left: Observation::Value(Term::boolean(true)), right: Observation::Error }
}

fn main() {
    let mut report = Report { lines: vec![] };

    let (ok, d) = omega();
    report.line(1, ok, d);

    let start = Instant::now();
    let runs: Vec<VariantRun> = VARIANTS.into_iter().map(variant_run).collect();
    let suite_time = start.elapsed();
    let by = |v: Variant| runs.iter().find(|r| r.variant == v).unwrap();

    let mut parts: Vec<(String, &Tally)> = vec![];
    for r in &runs {
        parts.push((format!("{} progress", r.variant), &r.progress));
        parts.push((format!("{} subject reduction", r.variant), &r.subject_reduction));
        if r.variant != Variant::Grad {
            parts.push((format!("{} normalization", r.variant), &r.normalization));
            parts.push((format!("{} dgg", r.variant), &r.dgg));
        } else {
            parts.push((format!("{} dgg", r.variant), &r.dgg));
        }
    }
    // The corpus harness over norm is reported but only the documented
    // counterexample is required there.
    let norm_dgg = &by(Variant::Norm).dgg;
    let strict: Vec<(&str, &Tally)> =
        parts.iter().filter(|(n, _)| !n.starts_with("norm dgg")).map(|(n, t)| (n.as_str(), *t)).collect();
    let (ok, d) = tallies(&strict);
    let ce = norm_dgg_counterexample();
    report.line(2, ok && ce, format!("{d}; norm dgg [{norm_dgg}]; norm counterexample true vs err: {ce}"));

    let mut ok = true;
    let mut notes = vec![];
    for r in &runs {
        ok &= r.conservativity.ok() && r.conservativity.checked >= MIN_STATIC;
        let expect_rejected = r.variant == Variant::Shift;
        let printf_only = r.rejected.iter().all(|n| n.starts_with("printf"));
        ok &= printf_only && (r.rejected.is_empty() != expect_rejected);
        notes.push(format!("{} [{}] rejected {:?}", r.variant, r.conservativity, r.rejected));
        for f in &r.conservativity.failures {
            println!("    {f}");
        }
    }
    report.line(3, ok, notes.join("; "));

    let mut notes = vec![];
    let ok = evals_match("vectors.gcic", &["nil nat", "err[vec nat 1]", "err[nat]", "0"], &mut notes);
    report.line(4, ok, notes.join(", "));

    let mut notes = vec![];
    let fvec = evals_match("fvec.gcic", &["tt", "err[prod nat unit]", "?[nat]"], &mut notes);
    let ford =
        evals_match("fording.gcic", &["nil_eqdec nat 0 tt", "nil_eqdec nat 1 err[empty]", "err[nat]", "0"], &mut notes);
    report.line(5, fvec && ford, notes.join(", "));

    let mut parts: Vec<(String, &Tally)> = vec![];
    for r in &runs {
        for (n, t) in [
            ("confluence", &r.confluence),
            ("subject reduction", &r.subject_reduction),
            ("progress", &r.progress),
            ("catch-up", &r.catch_up),
            ("simulation", &r.simulation),
            ("monotonicity", &r.monotonicity),
        ] {
            parts.push((format!("{} {n}", r.variant), t));
        }
    }
    let view: Vec<(&str, &Tally)> = parts.iter().map(|(n, t)| (n.as_str(), *t)).collect();
    let (ok, d) = tallies(&view);
    let sizes = runs.iter().map(|r| format!("{} {} terms", r.variant, r.terms)).collect::<Vec<_>>().join(", ");
    report.line(6, ok && suite_time < SUITE_TIME, format!("{sizes}; {d}; all variants {suite_time:.1?}"));

    let view: Vec<(String, &Tally)> = runs.iter().map(|r| (format!("{} oracle", r.variant), &r.oracle)).collect();
    let view: Vec<(&str, &Tally)> = view.iter().map(|(n, t)| (n.as_str(), *t)).collect();
    let (ok, d) = tallies(&view);
    report.line(7, ok, d);

    let mut ok = true;
    let mut notes = vec![];
    for v in [Variant::Grad, Variant::Shift] {
        let r = by(v);
        ok &= r.graduality.ok() && r.graduality.checked - r.graduality.inconclusive >= MIN_GRADUALITY;
        notes.push(format!("{v} {} pairs [{}]", r.graduality_pairs, r.graduality));
        for f in r.graduality.failures.iter().take(3) {
            println!("    {f}");
        }
    }
    report.line(8, ok, notes.join("; "));

    let failed: Vec<usize> = report.lines.iter().filter(|l| !l.1).map(|l| l.0).collect();
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
