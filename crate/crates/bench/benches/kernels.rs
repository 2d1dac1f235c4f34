use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use lawvere::catalogue::{boole_theory, cantor_theory, groups_theory, gsets_theory};
use lawvere::dsl::parse_term;
use lawvere::group::FiniteGroup;
use lawvere::kronecker::kronecker;
use lawvere::kzero::{k0, K0Options};
use lawvere::models::count_models;
use lawvere::theory::Theory;

fn normalize(c: &mut Criterion) {
    let cases: Vec<(Theory, &str)> = vec![
        (cantor_theory(2).unwrap(), "mu(nu1(mu(nu2(x1),nu1(x2))),nu2(mu(nu1(mu(x1,x2)),nu2(x2))))"),
        (groups_theory(), "mul(inv(mul(x1,inv(x2))),mul(mul(x2,e),inv(inv(mul(x1,x2)))))"),
        (boole_theory(), "or(and(x1,not(x2)),and(not(or(x1,x3)),or(x2,and(x3,1))))"),
    ];
    let mut group = c.benchmark_group("normalize");
    for (th, src) in &cases {
        let t = parse_term(src).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(th.name()), &t, |b, t| {
            b.iter(|| th.normalize(black_box(t), 3).unwrap())
        });
    }
    group.finish();
}

fn k0_cantor(c: &mut Criterion) {
    let mut group = c.benchmark_group("k0");
    group.sample_size(10);
    for a in [2, 3] {
        let th = cantor_theory(a).unwrap();
        let opts = K0Options { jobs: 1, ..K0Options::default() };
        group.bench_with_input(BenchmarkId::new("Cantor", a), &th, |b, th| b.iter(|| k0(th, &opts).unwrap()));
    }
    group.finish();
}

fn models(c: &mut Criterion) {
    let (c2, c3) = (FiniteGroup::cyclic(2), FiniteGroup::cyclic(3));
    let kt = kronecker(&gsets_theory(&c2).unwrap(), &gsets_theory(&c3).unwrap()).unwrap();
    let boole = boole_theory();
    let mut group = c.benchmark_group("count_models");
    group.sample_size(10);
    group.bench_function("Boole/4", |b| b.iter(|| count_models(&boole, 4).unwrap()));
    group.bench_function("C2xC3/4", |b| b.iter(|| count_models(&kt.combined, 4).unwrap()));
    group.finish();
}

criterion_group!(benches, normalize, k0_cantor, models);
criterion_main!(benches);
