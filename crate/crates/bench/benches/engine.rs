use criterion::{black_box, criterion_group, criterion_main, Criterion};

use odeinv_core::catalogue::{Catalogue, Label, Variant};
use odeinv_core::harness::run_suite;
use odeinv_core::jet::JetExpr;
use odeinv_core::liegen::{count_invariants, prolong, verify_annihilates, CountMethod};
use odeinv_core::ode::{Form, LinearODE};
use odeinv_core::parse::parse;
use odeinv_core::transforms::apply_w_group;

fn kernel(c: &mut Criterion) {
    let a = parse("(a0*a1' - a2^2)/(a2 + x)").unwrap();
    let b = parse("(a1 - 3*a0'')/(a2 - 1)").unwrap();
    c.bench_function("rational sum", |bch| bch.iter(|| black_box(&a) + black_box(&b)));
    c.bench_function("total derivative", |bch| bch.iter(|| black_box(&a).total_derivative(3).unwrap()));
    let text =
        "(18*(-a1^4 - a1^3*a2' + a2^3*a0'') - 6*a1*a2^2*(11*a0' + 2*a1'') + a1^2*a2*(55*a0 + 40*a1' + 6*a2''))^3/(5832*a2^16)";
    c.bench_function("parse", |bch| bch.iter(|| parse(black_box(text)).unwrap()));
}

fn lie(c: &mut Criterion) {
    let cat = Catalogue::builtin();
    let gen = cat.working_generator(Form::W, 5).unwrap().clone();
    let inv = cat.invariant(Form::W, 5, Label { p: 2, index: 7 }, Variant::Printed).unwrap().rationalized.clone();
    c.bench_function("prolong w5 to p=3", |b| b.iter(|| prolong(black_box(&gen), 3).unwrap()));
    c.bench_function("annihilate psi[w;5;2.7]", |b| b.iter(|| verify_annihilates(&gen, 2, black_box(&inv)).unwrap()));
    c.bench_function("count by rank n=5 p=2", |b| b.iter(|| count_invariants(Form::W, 5, 2, CountMethod::Rank).unwrap()));
}

fn transforms(c: &mut Criterion) {
    let params = ["A", "B", "C", "D"].map(JetExpr::param);
    let ode = LinearODE::generic(Form::W, 5);
    c.bench_function("symbolic w-group n=5", |b| b.iter(|| apply_w_group(black_box(&ode), &params, None).unwrap()));
    let cat = Catalogue::builtin();
    let mut group = c.benchmark_group("suite");
    group.sample_size(10);
    group.bench_function("w n=4, 5 trials", |b| b.iter(|| run_suite(&cat, Form::W, 4, 5, 1).unwrap()));
    group.finish();
}

criterion_group!(benches, kernel, lie, transforms);
criterion_main!(benches);
