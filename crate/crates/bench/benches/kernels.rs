use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use symorbit::hermann::generate_table;
use symorbit::{
    complex_focal_radii, determinant_focal_scan, isotropy_shape_spectrum, maximal_abelian, restricted_roots,
    shape_operator, OrbitPoint, Selector,
};
use symorbit_bench::{fixture, pair};

const SPACES: [&str; 3] = ["SL(3,R)/SO0(1,2)", "Sp(2,R)/SU(1,1).U(1)", "SL(3,C)/SU(1,2)"];

fn roots(c: &mut Criterion) {
    let mut g = c.benchmark_group("restricted_roots");
    for space in SPACES {
        let p = pair(space);
        g.bench_with_input(BenchmarkId::from_parameter(space), &p, |b, p| {
            b.iter(|| {
                let cs = maximal_abelian(p, Selector::Q, 0).unwrap();
                black_box(restricted_roots(p, &cs).unwrap())
            })
        });
    }
    g.finish();
}

fn spectra(c: &mut Criterion) {
    let mut g = c.benchmark_group("shape_spectrum");
    for space in SPACES {
        let f = fixture(space);
        let point = OrbitPoint::from_coeffs(&f.system, &f.w);
        g.bench_function(BenchmarkId::new("closed_form", space), |b| {
            b.iter(|| black_box(isotropy_shape_spectrum(&f.system, &point, &f.a).unwrap()))
        });
        let (w, a) = (f.system.cartan.combine(&f.w), f.system.cartan.combine(&f.a));
        g.bench_function(BenchmarkId::new("oracle", space), |b| {
            b.iter(|| black_box(shape_operator(&f.pair, &f.pair.h, &w, &a).unwrap()))
        });
    }
    g.finish();
}

fn focal(c: &mut Criterion) {
    let f = fixture("SL(3,R)/SO0(1,2)");
    let point = OrbitPoint::from_coeffs(&f.system, &f.w);
    c.bench_function("focal/closed_form", |b| {
        b.iter(|| black_box(complex_focal_radii(&f.system, &point, &f.a, 8.0).unwrap()))
    });
    let sh = shape_operator(&f.pair, &f.pair.h, &f.system.cartan.combine(&f.w), &f.system.cartan.combine(&f.a)).unwrap();
    let mut g = c.benchmark_group("focal");
    g.sample_size(10);
    g.bench_function("determinant_scan", |b| {
        b.iter(|| black_box(determinant_focal_scan(&sh.jacobi, &sh.shape, 4.0, 0.1).unwrap()))
    });
    g.finish();
}

fn tables(c: &mut Criterion) {
    let mut g = c.benchmark_group("tables");
    g.sample_size(10);
    for id in 1..=3u8 {
        g.bench_with_input(BenchmarkId::new("bound_3", id), &id, |b, &id| b.iter(|| black_box(generate_table(id, 3).unwrap())));
    }
    g.finish();
}

criterion_group!(benches, roots, spectra, focal, tables);
criterion_main!(benches);
