//! The ten acceptance criteria, one pass/fail line each.

mod common;

use std::time::Instant;

use odeinv_core::catalogue::{algebra_matches_group, Catalogue, Label, Variant};
use odeinv_core::harness::run_suite;
use odeinv_core::jet::JetExpr;
use odeinv_core::liegen::{count_invariants, derive_coefficient_generator, verify_annihilates, CountMethod};
use odeinv_core::ode::{Form, LinearODE};
use odeinv_core::parse::parse;
use odeinv_core::transforms::{apply_w_group, brioschi_reduce, brioschi_residual, reduce_to_normal, Brioschi};
use proptest::strategy::Strategy;

type Outcome = Result<String, String>;
type Slice = (Form, usize, u32, &'static [(u32, u32)]);
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn annihilation_suite() -> Outcome {
    let cat = Catalogue::builtin();
    let required: &[Slice] = &[
        (Form::Normal, 3, 3, &[(3, 1)]),
        (Form::W, 3, 3, &[(3, 1), (3, 2)]),
        (Form::W, 4, 2, &[(2, 1), (2, 2), (2, 3), (2, 4)]),
        (Form::W, 5, 2, &[(2, 1), (2, 2), (2, 3), (2, 4), (2, 5), (2, 6), (2, 7)]),
        (Form::Standard, 3, 4, &[(4, 1)]),
    ];
    let mut checked = 0;
    for (form, n, p, labels) in required {
        let gen = cat.working_generator(*form, *n).map_err(|e| e.to_string())?;
        for &(lp, index) in *labels {
            let rec = cat
                .invariant(*form, *n, Label { p: lp, index }, Variant::Printed)
                .ok_or(format!("{form} {n} {lp}.{index} missing"))?;
            let verdict = verify_annihilates(gen, *p, &rec.rationalized).map_err(|e| e.to_string())?;
            check(verdict.holds(), format!("{} is not annihilated", rec.id()))?;
            checked += 1;
        }
    }
    let mut flagged = Vec::new();
    for (form, n, lp, index) in [(Form::Normal, 3, 4, 2), (Form::Normal, 4, 2, 2)] {
        let rec = cat.invariant(form, n, Label { p: lp, index }, Variant::Printed).ok_or("flagged record missing")?;
        flagged.push(format!("{} {}", rec.id(), cat.invariant_status(rec)));
    }
    Ok(format!("{checked} invariants annihilated; flagged: {}", flagged.join(", ")))
}

fn negative_prolongation_bound() -> Outcome {
    let cat = Catalogue::builtin();
    let gen = cat.working_generator(Form::Standard, 3).map_err(|e| e.to_string())?;
    let rec = cat.invariant(Form::Standard, 3, Label { p: 4, index: 1 }, Variant::Printed).ok_or("missing")?;
    let at3 = verify_annihilates(gen, 3, &rec.rationalized).map_err(|e| e.to_string())?;
    let at4 = verify_annihilates(gen, 4, &rec.rationalized).map_err(|e| e.to_string())?;
    check(!at3.holds(), "third prolongation annihilates the pullback invariant")?;
    check(at4.holds(), "fourth prolongation does not annihilate it")?;
    Ok("fails at p=3, holds at p=4".into())
}

fn counting() -> Outcome {
    let cat = Catalogue::builtin();
    let table = [(3, 0, 0), (3, 2, 1), (3, 3, 2), (4, 1, 2), (4, 2, 4), (5, 0, 1), (5, 1, 4), (5, 2, 7)];
    for (n, p, expected) in table {
        let formula = count_invariants(Form::W, n, p, CountMethod::Formula).map_err(|e| e.to_string())?;
        let rank = count_invariants(Form::W, n, p, CountMethod::Rank).map_err(|e| e.to_string())?;
        let listed = cat.get_invariants(Form::W, n, p as u32).map(|v| v.len()).unwrap_or(0);
        check(
            formula == expected && rank == expected && listed == expected,
            format!("(n={n}, p={p}): formula {formula}, rank {rank}, catalogue {listed}, expected {expected}"),
        )?;
    }
    Ok(format!("{} (n, p) pairs agree", table.len()))
}

fn w_group_preserves_form() -> Outcome {
    let params = ["A", "B", "C", "D"].map(JetExpr::param);
    for n in 3..=6 {
        let out = apply_w_group(&LinearODE::generic(Form::W, n), &params, None).map_err(|e| e.to_string())?;
        check(out.ode.coeffs[n - 1].is_zero() && out.ode.coeffs[n - 2].is_zero(), format!("n={n}: form not preserved"))?;
        let expected = parse(&format!("B^{n}*(1 + A*x)^{}/D", n + 1)).map_err(|e| e.to_string())?;
        check(out.leading.equals(&expected), format!("n={n}: leading factor {}", out.leading))?;
    }
    Ok("n = 3..6 preserved, leading factor B^n (1 + A x)^(n+1) / D".into())
}

fn eps_derivation() -> Outcome {
    let cat = Catalogue::builtin();
    for form in [Form::Standard, Form::Normal] {
        let derived = derive_coefficient_generator(form, 3).map_err(|e| e.to_string())?;
        let printed = &cat.get_generator(form, 3).map_err(|e| e.to_string())?.field;
        check(derived.equals(printed), format!("{form}: derived {derived} vs printed {printed}"))?;
    }
    Ok("standard and normal third-order generators reproduced".into())
}

fn normal_reduction() -> Outcome {
    let (reduced, _) = reduce_to_normal(&LinearODE::generic(Form::Standard, 3), None).map_err(|e| e.to_string())?;
    let b0 = parse("(27*a0 - 9*a1*a2 + 2*a2^3 - 9*a2'')/27").unwrap();
    let b1 = parse("(27*a1 - 9*a2^2 - 27*a2')/27").unwrap();
    check(reduced.coeffs[0].equals(&b0), format!("B0 = {}", reduced.coeffs[0]))?;
    check(reduced.coeffs[1].equals(&b1), format!("B1 = {}", reduced.coeffs[1]))?;
    check(reduced.coeffs[2].is_zero(), "a2 survives")?;
    Ok("B0, B1 exact".into())
}

fn group_to_algebra_span() -> Outcome {
    let cat = Catalogue::builtin();
    let group = cat.group(Form::W).ok_or("no w group")?;
    for n in 3..=5 {
        let alg = cat.algebras.iter().find(|a| a.form == Form::W && a.n == n).ok_or(format!("V0 for n={n} missing"))?;
        let family = group.instantiate(n).map_err(|e| e.to_string())?;
        check(algebra_matches_group(&alg.field, &family).map_err(|e| e.to_string())?, format!("n={n}: spans differ"))?;
    }
    Ok("V0 spans match for n = 3, 4, 5".into())
}

fn brioschi() -> Outcome {
    let a1 = JetExpr::coeff(1, 0);
    let a0 = JetExpr::coeff(1, 1).scale(&num_rational::BigRational::new(1.into(), 2.into()));
    let ode = LinearODE::new(3, Form::Normal, vec![a0, a1, JetExpr::zero()]);
    let Brioschi::Reduced { equation, .. } = brioschi_reduce(&ode).map_err(|e| e.to_string())? else {
        return Err("reduction not applicable".into());
    };
    let quarter = parse("a1/4").unwrap();
    check(
        equation.n == 2 && equation.coeffs[0].equals(&quarter) && equation.coeffs[1].is_zero(),
        format!("reduced: {equation}"),
    )?;
    let residual = brioschi_residual(&ode, &equation).map_err(|e| e.to_string())?;
    check(residual.is_zero(), format!("residual {residual}"))?;
    Ok("y = ybar^2 with ybar'' + (a1/4) ybar = 0 leaves zero".into())
}

fn invariance_trials() -> Outcome {
    let cat = Catalogue::builtin();
    let mut summary = Vec::new();
    for n in 3..=5 {
        let r = run_suite(&cat, Form::W, n, 20, 3).map_err(|e| e.to_string())?;
        check(r.fail == 0 && r.pass > 0, format!("n={n}: {} failures", r.fail))?;
        check(r.mutations.iter().all(|m| m.caught), format!("n={n}: a mutation survived"))?;
        summary.push(format!("n={n} {}/{} pass", r.pass, r.pass + r.fail + r.undefined));
    }
    Ok(summary.join(", "))
}

fn kernel_properties() -> Outcome {
    use common::*;
    let mut total = 0;
    let mut run = |name: &str, seed: u8, f: &mut dyn FnMut(&mut proptest::test_runner::TestRunner) -> Result<(), String>| {
        let mut runner = seeded_runner(CASES, seed);
        f(&mut runner).map_err(|e| format!("{name}: {e}"))?;
        total += CASES;
        Ok::<(), String>(())
    };
    run("ring laws", 1, &mut |r| r.run(&(expr(), expr(), expr()), |(a, b, c)| ring_laws(&a, &b, &c)).map_err(|e| e.to_string()))?;
    run("derivation laws", 2, &mut |r| r.run(&(expr(), expr()), |(a, b)| derivation_laws(&a, &b)).map_err(|e| e.to_string()))?;
    let gens = three_coefficient_generators();
    run("prolongation coherence", 3, &mut |r| {
        r.run(&(coeff_expr(), (0usize..3).prop_map(|i| i)), |(f, i)| prolongation_coherence(&gens[i], &f))
            .map_err(|e| e.to_string())
    })?;
    run("parser round trip", 4, &mut |r| r.run(&expr(), |a| parse_round_trip(&a)).map_err(|e| e.to_string()))?;
    Ok(format!("{total} seeded cases, no failures"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("annihilation suite", annihilation_suite),
        ("negative prolongation bound", negative_prolongation_bound),
        ("invariant counts", counting),
        ("w-group preserves the form", w_group_preserves_form),
        ("epsilon derivation of generators", eps_derivation),
        ("reduction to normal form", normal_reduction),
        ("group to algebra", group_to_algebra_span),
        ("Brioschi reduction", brioschi),
        ("exact invariance trials", invariance_trials),
        ("kernel properties", kernel_properties),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                println!("criterion {:>2} FAIL  {name}: {why} ({secs:.2}s)", i + 1);
                failed.push(i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
