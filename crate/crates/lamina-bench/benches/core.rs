use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lamina::angle::{x0_digits, CircleAngle};
use lamina::dynamics::{m2_raster, trace_parameter_ray, Bounds};
use lamina::lamination::build_2l;
use lamina::measure::h_arc;
use lamina::symbolic::leaf_addresses_match;

fn angle(s: &str) -> CircleAngle {
    s.parse().unwrap()
}

fn exact(c: &mut Criterion) {
    let theta = angle("5/12");
    c.bench_function("x0_digits 5/12", |b| b.iter(|| x0_digits(black_box(&theta)).unwrap()));
    let z = angle("3/10");
    c.bench_function("h_arc depth 30", |b| b.iter(|| h_arc(black_box(&z), &theta, 30).unwrap()));
}

fn laminations(c: &mut Criterion) {
    let theta = angle("1/6");
    let mut g = c.benchmark_group("build_2l");
    for depth in [4, 8, 10] {
        g.bench_with_input(BenchmarkId::from_parameter(depth), &depth, |b, &d| b.iter(|| build_2l(&theta, d).unwrap()));
    }
    g.finish();
    c.bench_function("leaf_addresses_match depth 8", |b| b.iter(|| leaf_addresses_match(&theta, 8).unwrap()));
}

fn dynamics(c: &mut Criterion) {
    let mut g = c.benchmark_group("dynamics");
    g.sample_size(10);
    g.bench_function("m2_raster 100x100", |b| {
        b.iter(|| m2_raster(Bounds::new(-4.0, 4.0, -4.0, 4.0), 100, 100, 256).unwrap())
    });
    let theta = angle("1/6");
    g.bench_function("parameter ray 1/6", |b| b.iter(|| trace_parameter_ray(&theta, 8.0, 0.25, 4).unwrap()));
    g.finish();
}

criterion_group!(benches, exact, laminations, dynamics);
criterion_main!(benches);
