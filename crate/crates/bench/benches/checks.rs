use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use opm_fixpoint::conditions::{check_classical_condition, check_new_condition, Domain, GridSpec};
use opm_fixpoint::expr::parse;
use opm_fixpoint::oracle::{enumerate_cfp, generate_instance, stress_theorem, RandomInstanceSpec};
use opm_fixpoint::solver::{iterate, SolverOptions};
use opm_fixpoint::{ExprMap, Metric, RealVectorSpace};
use std::hint::black_box;

fn finite_conditions(c: &mut Criterion) {
    let mut group = c.benchmark_group("finite_conditions");
    for n in [4, 6, 8] {
        let (space, map) = generate_instance(&RandomInstanceSpec::new(n, 42)).unwrap();
        let domain = Domain::finite(&space);
        group.bench_with_input(BenchmarkId::new("new", n), &n, |b, _| {
            b.iter(|| check_new_condition(&space, &map, black_box(&domain)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("classical", n), &n, |b, _| {
            b.iter(|| check_classical_condition(&space, &map, black_box(&domain)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("enumerate", n), &n, |b, _| {
            b.iter(|| enumerate_cfp(black_box(&space), &map))
        });
    }
    group.finish();
}

fn sampled_conditions(c: &mut Criterion) {
    let space = RealVectorSpace::new(1, Metric::L1, Some(vec![[-1.0, 1.0]])).unwrap();
    let map = ExprMap::parse(&space, &["(x1 - 2*y1) / 8"]).unwrap();
    let domain = Domain::grid(&space, &GridSpec::default()).unwrap();
    c.bench_function("sampled_new_condition_21", |b| {
        b.iter(|| check_new_condition(&space, &map, black_box(&domain)).unwrap())
    });
}

fn solver(c: &mut Criterion) {
    let space = RealVectorSpace::new(2, Metric::L2, None).unwrap();
    let map = ExprMap::parse(&space, &["(x1 - 2*y2) / 8", "(x2 - y1) / 4"]).unwrap();
    let opts = SolverOptions::default();
    c.bench_function("iterate_linear_2d", |b| {
        b.iter(|| {
            iterate(
                &space,
                &map,
                black_box(&vec![-1.0, -1.0]),
                &vec![1.0, 1.0],
                &opts,
            )
            .unwrap()
        })
    });
}

fn parser(c: &mut Criterion) {
    let text = "max(x1 - 2*y2, min(abs(x2), 0.5)) / 8 + -(y1 * 0.25 - x3) / (1 + abs(y3))";
    c.bench_function("parse_expression", |b| {
        b.iter(|| parse(black_box(text), 3).unwrap())
    });
}

fn stress(c: &mut Criterion) {
    let spec = RandomInstanceSpec::new(4, 7);
    let mut group = c.benchmark_group("stress");
    group.sample_size(10);
    group.bench_function("stress_500_n4", |b| {
        b.iter(|| stress_theorem(black_box(&spec), 500).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    finite_conditions,
    sampled_conditions,
    solver,
    parser,
    stress
);
criterion_main!(benches);
