use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use weldlab_core::fuchsian::{enumerate, octagon_group};
use weldlab_core::grunsky::{build_b1, log_det_complement};
use weldlab_core::liouville::s1;
use weldlab_core::maps::{catalog, theodorsen_interior, CatalogOptions, RadiusFunction, StarDomain, TheodorsenOptions};
use weldlab_core::Family;

fn theodorsen(c: &mut Criterion) {
    let domain = StarDomain::new(RadiusFunction::Ellipse { c: 0.3 }).unwrap();
    let mut g = c.benchmark_group("theodorsen_ellipse_0.3");
    for m in [256, 1024] {
        g.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, &m| {
            b.iter(|| theodorsen_interior(black_box(&domain), m, &TheodorsenOptions::default()).unwrap())
        });
    }
    g.finish();
}

fn grunsky(c: &mut Criterion) {
    let pair = catalog(Family::FourierBump { eps: 0.05, k: 2 }, &CatalogOptions::default()).unwrap();
    let mut g = c.benchmark_group("bump");
    for n in [32, 64, 128] {
        g.bench_with_input(BenchmarkId::new("build_b1", n), &n, |b, &n| b.iter(|| build_b1(black_box(&pair), n).unwrap()));
        let b1 = build_b1(&pair, n).unwrap();
        g.bench_with_input(BenchmarkId::new("log_det", n), &b1, |b, m| b.iter(|| log_det_complement(black_box(m)).unwrap()));
    }
    g.finish();
}

fn liouville(c: &mut Criterion) {
    let pair = catalog(Family::Ellipse { c: 0.3 }, &CatalogOptions::default()).unwrap();
    c.bench_function("s1_ellipse_0.3_128x256", |b| b.iter(|| s1(black_box(&pair), &[(128, 256)]).unwrap()));
}

fn group(c: &mut Criterion) {
    let g = octagon_group();
    c.bench_function("enumerate_L4", |b| b.iter(|| enumerate(black_box(&g), 4).unwrap()));
}

criterion_group!(benches, theodorsen, grunsky, liouville, group);
criterion_main!(benches);
