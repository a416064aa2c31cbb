use std::hint::black_box;

use ahlfors_bench::{two_disks, two_ellipses};
use ahlfors_core::geometry::offset_cycle;
use ahlfors_core::{ahlfors_solve, gamma, gamma_c_lower, koebe_uniformize, painleve_measure, slit_uniformize, CircleDomain, C64};
use criterion::{criterion_group, criterion_main, Criterion};

fn szego(c: &mut Criterion) {
    let mut g = c.benchmark_group("szego");
    for sep in [1.5, 3.0] {
        let d = two_disks(sep);
        g.bench_function(format!("two_disks_{sep}"), |b| b.iter(|| gamma(black_box(&d), 64).unwrap()));
    }
    let e = two_ellipses();
    g.bench_function("two_ellipses", |b| b.iter(|| gamma(black_box(&e), 64).unwrap()));
    g.finish();
}

fn slit(c: &mut Criterion) {
    let disks = CircleDomain::new(vec![C64::new(-1.1, 0.0), C64::new(1.1, 0.0)], vec![1.0, 1.0]).unwrap();
    c.bench_function("slit_map_gap_0.2", |b| b.iter(|| slit_uniformize(black_box(&disks), 1e-9).unwrap()));
}

fn koebe(c: &mut Criterion) {
    let e = two_ellipses();
    let mut g = c.benchmark_group("koebe");
    g.sample_size(10);
    g.bench_function("two_ellipses", |b| b.iter(|| koebe_uniformize(black_box(&e), 1e-10, 50).unwrap()));
    g.finish();
}

fn measures(c: &mut Criterion) {
    let d = two_disks(3.0);
    let f = ahlfors_solve(&d, 64).unwrap();
    let cycle = offset_cycle(&d, 0.25).unwrap();
    c.bench_function("painleve_two_disks", |b| b.iter(|| painleve_measure(black_box(&f), &cycle).unwrap()));
    let mut g = c.benchmark_group("lp");
    g.sample_size(10);
    g.bench_function("gamma_c_two_disks_32", |b| b.iter(|| gamma_c_lower(black_box(&d), 32, 4, 32).unwrap()));
    g.finish();
}

criterion_group!(benches, szego, slit, koebe, measures);
criterion_main!(benches);
