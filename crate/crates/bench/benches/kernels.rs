use criterion::{black_box, criterion_group, criterion_main, Criterion};

use pcr4bp_core::bifurcation;
use pcr4bp_core::potential;
use pcr4bp_core::solve;
use pcr4bp_core::{Interval, PBox, ParamRect};

fn interval_ops(c: &mut Criterion) {
    let a = Interval::new(0.3, 0.31);
    let b = Interval::new(-1.2, 2.5);
    c.bench_function("interval mul+add", |bch| bch.iter(|| black_box(a) * black_box(b) + black_box(a)));
    c.bench_function("interval sin_cos", |bch| bch.iter(|| black_box(b).sin_cos()));
}

fn potential_kernels(c: &mut Criterion) {
    let bx = PBox::from_bounds((0.6, 0.61), (0.2, 0.21));
    let pt = ParamRect::point(0.25, 0.25);
    let rect = ParamRect::from_bounds((0.2, 0.21), (0.56, 0.57));
    c.bench_function("evaluate point param", |bch| bch.iter(|| potential::evaluate(black_box(&bx), &pt)));
    c.bench_function("evaluate param rect", |bch| bch.iter(|| potential::evaluate(black_box(&bx), &rect)));
    c.bench_function("jacobian", |bch| bch.iter(|| potential::jacobian(black_box(&bx), &pt)));
    c.bench_function("jets order 3 mean value", |bch| bch.iter(|| potential::f_jet_mv(black_box(&bx), &rect, 3)));
}

fn solver_kernels(c: &mut Criterion) {
    let pt = ParamRect::point(0.25, 0.25);
    let near = PBox::from_bounds((0.99, 1.01), (-0.01, 0.01));
    c.bench_function("krawczyk step", |bch| bch.iter(|| solve::krawczyk(black_box(&near), &pt)));
    let mut g = c.benchmark_group("searches");
    g.sample_size(10);
    g.bench_function("count solutions (1/4, 1/4)", |bch| {
        bch.iter(|| solve::count_solutions(&solve::global_region(), &pt, 1e-6))
    });
    let c0 = PBox::from_bounds((1.0 / 3.0, 1.0), (-0.2, 0.7));
    let rect = ParamRect::from_bounds((0.3, 0.3001), (0.56, 0.5601));
    g.bench_function("classify inner rect", |bch| bch.iter(|| bifurcation::classify_inner(&c0, &rect)));
    g.finish();
}

criterion_group!(benches, interval_ops, potential_kernels, solver_kernels);
criterion_main!(benches);
