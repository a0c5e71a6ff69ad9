use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use latdisc::lattice::build_lattice;
use latdisc::quadratic::geometric_grid;
use latdisc::{beck_constant_estimate, d2_exact, prop1_enclosure, Algo, Alpha, Precision, Variant};

fn pairwise_sums(c: &mut Criterion) {
    let golden = Alpha::parse("surd:1,5,2").unwrap();
    let mut g = c.benchmark_group("d2_exact");
    for n in [233usize, 987] {
        let set = build_lattice(&golden, n, true, Precision::Bits64).unwrap().points;
        g.bench_with_input(BenchmarkId::new("quadratic", n), &set, |b, s| {
            b.iter(|| d2_exact(black_box(s), Algo::Quadratic))
        });
        g.bench_with_input(BenchmarkId::new("fast", n), &set, |b, s| b.iter(|| d2_exact(black_box(s), Algo::Fast)));
    }
    let set = build_lattice(&golden, 46_368, true, Precision::Bits64).unwrap().points;
    g.sample_size(10);
    g.bench_with_input(BenchmarkId::new("fast", 46_368), &set, |b, s| b.iter(|| d2_exact(black_box(s), Algo::Fast)));
    g.finish();
}

fn enclosures(c: &mut Criterion) {
    let root3 = Alpha::parse("surd:0,3,1").unwrap();
    c.bench_function("prop1_enclosure_S_1e5", |b| b.iter(|| prop1_enclosure(black_box(&root3), 100_000, Variant::S)));
    let grid = geometric_grid(1_000, 1_000_000, 7);
    let mut g = c.benchmark_group("beck");
    g.sample_size(10);
    g.bench_function("estimate_1e6", |b| b.iter(|| beck_constant_estimate(black_box(&root3), &grid)));
    g.finish();
}

criterion_group!(benches, pairwise_sums, enclosures);
criterion_main!(benches);
