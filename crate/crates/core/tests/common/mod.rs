//! Strategies and property checks shared by the property and acceptance
//! tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_rational::BigRational;
use odeinv_core::catalogue::Catalogue;
use odeinv_core::jet::{EpsExpr, JetError, JetExpr, JetVar};
use odeinv_core::liegen::{lie_apply, prolong, VectorField};
use odeinv_core::ode::Form;
use odeinv_core::parse::{parse, print};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub const CASES: u32 = 1000;

/// Runner with a fixed seed so failures reproduce.
pub fn seeded_runner(cases: u32, seed: u8) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]))
}

fn jet_var() -> impl Strategy<Value = JetExpr> {
    prop_oneof![Just(JetExpr::x()), (0usize..3, 0u32..3).prop_map(|(j, k)| JetExpr::coeff(j, k)), (0u32..3).prop_map(JetExpr::y),]
}

/// Coefficient jets and `x` only.
fn coeff_var() -> impl Strategy<Value = JetExpr> {
    prop_oneof![Just(JetExpr::x()), (0usize..3, 0u32..3).prop_map(|(j, k)| JetExpr::coeff(j, k))]
}

fn leaf(vars: BoxedStrategy<JetExpr>) -> BoxedStrategy<JetExpr> {
    prop_oneof![(-6i64..=6, 1i64..=4).prop_map(|(n, d)| JetExpr::rational(n, d)), vars].boxed()
}

/// Never identically zero: a variable plus a constant.
fn divisor(vars: BoxedStrategy<JetExpr>) -> BoxedStrategy<JetExpr> {
    (vars, -3i64..=3).prop_map(|(v, c)| &v + &JetExpr::int(c)).boxed()
}

fn tree(vars: BoxedStrategy<JetExpr>, depth: u32) -> BoxedStrategy<JetExpr> {
    let div = divisor(vars.clone());
    leaf(vars)
        .prop_recursive(depth, 24, 2, move |inner| {
            prop_oneof![
                3 => (inner.clone(), inner.clone()).prop_map(|(a, b)| &a + &b),
                2 => (inner.clone(), inner.clone()).prop_map(|(a, b)| &a - &b),
                3 => (inner.clone(), inner.clone()).prop_map(|(a, b)| &a * &b),
                1 => (inner.clone(), div.clone()).prop_map(|(a, b)| a.checked_div(&b).expect("non-zero divisor")),
                1 => (inner.clone(), 1i64..=3).prop_map(|(a, k)| a.pow(k).expect("integer power")),
            ]
        })
        .boxed()
}

/// Rational functions of `x`, coefficient jets and `y` jets.
pub fn expr() -> BoxedStrategy<JetExpr> {
    tree(jet_var().boxed(), 3)
}

/// Rational functions of `x` and coefficient jets.
pub fn coeff_expr() -> BoxedStrategy<JetExpr> {
    tree(coeff_var().boxed(), 3)
}

pub fn point() -> impl Strategy<Value = BTreeMap<JetVar, BigRational>> {
    let mut vars = vec![JetVar::x()];
    vars.extend((0..3).flat_map(|j| (0..5).map(move |k| JetVar::coeff(j, k))));
    vars.extend((0..5).map(JetVar::y));
    proptest::collection::vec((-30i64..=30, 1i64..=7), vars.len())
        .prop_map(move |vals| vars.iter().zip(vals).map(|(v, (n, d))| (*v, BigRational::new(n.into(), d.into()))).collect())
}

fn ensure(ok: bool, what: &str, detail: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(format!("{what}: {}", detail())))
    }
}

#[allow(clippy::eq_op)]
pub fn ring_laws(a: &JetExpr, b: &JetExpr, c: &JetExpr) -> Result<(), TestCaseError> {
    let show = || format!("a={a} b={b} c={c}");
    ensure((a + b).equals(&(b + a)), "addition commutes", show)?;
    ensure((a * b).equals(&(b * a)), "multiplication commutes", show)?;
    ensure(((a + b) + c.clone()).equals(&(a + &(b + c))), "addition associates", show)?;
    ensure(((a * b) * c.clone()).equals(&(a * &(b * c))), "multiplication associates", show)?;
    ensure((a * &(b + c)).equals(&(&(a * b) + &(a * c))), "distributivity", show)?;
    ensure((a + &JetExpr::zero()).equals(a) && (a * &JetExpr::one()).equals(a), "identities", show)?;
    ensure((a - a).is_zero(), "additive inverse", show)?;
    if !a.is_zero() {
        ensure((a * &a.recip().unwrap()).is_one(), "multiplicative inverse", show)?;
    }
    Ok(())
}

pub fn derivation_laws(a: &JetExpr, b: &JetExpr) -> Result<(), TestCaseError> {
    let show = || format!("a={a} b={b}");
    let d = |e: &JetExpr| e.total_derivative(1).unwrap();
    ensure(d(&(a + b)).equals(&(&d(a) + &d(b))), "D is additive", show)?;
    ensure(d(&(a * b)).equals(&(&(&d(a) * b) + &(a * &d(b)))), "Leibniz rule", show)?;
    if !b.is_zero() {
        let q = a.checked_div(b).unwrap();
        let rhs = (&(&d(a) * b) - &(a * &d(b))).checked_div(&(b * b)).unwrap();
        ensure(d(&q).equals(&rhs), "quotient rule", show)?;
    }
    ensure(a.total_derivative(2).unwrap().equals(&d(&d(a))), "D^2 = D o D", show)?;
    let v = JetVar::coeff(1, 0);
    let p = |e: &JetExpr| e.partial(v).unwrap();
    ensure(p(&(a * b)).equals(&(&(&p(a) * b) + &(a * &p(b)))), "partial Leibniz rule", show)?;
    Ok(())
}

pub fn eps_inverse(a: &JetExpr, b: &JetExpr) -> Result<(), TestCaseError> {
    if a.is_zero() {
        return Ok(());
    }
    let e = EpsExpr::new(a.clone(), b.clone());
    let prod = &e * &e.inverse().unwrap();
    ensure(prod.zeroth.is_one() && prod.first.is_zero(), "(a + eps b)^-1", || format!("a={a} b={b}"))
}

/// Evaluation commutes with the ring operations.
pub fn eval_commutes(a: &JetExpr, b: &JetExpr, at: &BTreeMap<JetVar, BigRational>) -> Result<(), TestCaseError> {
    let ev = |e: &JetExpr| e.eval_map(at);
    let (va, vb) = match (ev(a), ev(b)) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(JetError::EvalDivisionByZero), _) | (_, Err(JetError::EvalDivisionByZero)) => return Ok(()),
        (Err(e), _) | (_, Err(e)) => return Err(TestCaseError::fail(e.to_string())),
    };
    let show = || format!("a={a} b={b}");
    ensure(ev(&(a + b)).ok() == Some(&va + &vb), "eval of sum", show)?;
    ensure(ev(&(a * b)).ok() == Some(&va * &vb), "eval of product", show)?;
    Ok(())
}

pub fn parse_round_trip(a: &JetExpr) -> Result<(), TestCaseError> {
    let text = print(a);
    let back = parse(&text).map_err(|e| TestCaseError::fail(format!("`{text}` does not parse: {e}")))?;
    ensure(back.equals(a), "parse(print(e)) = e", || text.clone())?;
    ensure(print(&back) == text, "printing is stable", || format!("{text} vs {}", print(&back)))
}

/// Generators acting on `a0`, `a1`, `a2` together with `x`.
pub fn three_coefficient_generators() -> Vec<VectorField> {
    let cat = Catalogue::builtin();
    [(Form::Standard, 3), (Form::Normal, 4), (Form::W, 5)]
        .into_iter()
        .map(|(f, n)| cat.working_generator(f, n).unwrap().clone())
        .collect()
}

/// `pr X (D F) = D (pr X F) - D(xi) D F`.
pub fn prolongation_coherence(vf: &VectorField, f: &JetExpr) -> Result<(), TestCaseError> {
    let order = f.max_order(|v| v.is_coeff()).unwrap_or(0) + 1;
    let pr = prolong(vf, order).unwrap();
    let df = f.total_derivative(1).unwrap();
    let lhs = lie_apply(&pr, &df).unwrap();
    let xi = vf.component(JetVar::x()).total_derivative(1).unwrap();
    let rhs = &lie_apply(&pr, f).unwrap().total_derivative(1).unwrap() - &(&xi * &df);
    ensure(lhs.equals(&rhs), "prolongation coherence", || format!("F={f}"))?;
    // truncation: the order-p prolongation is the restriction of order p+1
    let higher = prolong(vf, order + 1).unwrap();
    ensure(higher.restrict(|v| v.order() <= order || !v.is_coeff()).equals(&pr), "truncation", || format!("F={f}"))
}
