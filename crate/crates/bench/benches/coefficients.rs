use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use kstar_core::coeffs::{cpn_closed_table, cpn_recurrence, solve_g22, solve_general, RecurrenceCoordinate};
use kstar_core::permanent::{naive, ryser};
use kstar_core::{GeometryPoint, HRational, Matrix};

fn cpn_tables(c: &mut Criterion) {
    let mut group = c.benchmark_group("cpn2_order4");
    let geom = GeometryPoint::cpn(2).unwrap();
    group.bench_function("general", |b| b.iter(|| solve_general(black_box(&geom), 4).unwrap()));
    group.bench_function("closed", |b| b.iter(|| cpn_closed_table(black_box(2), 4).unwrap()));
    group.bench_function("recurrence", |b| {
        b.iter(|| cpn_recurrence(black_box(2), 4, RecurrenceCoordinate::First).unwrap())
    });
    group.finish();
}

fn grassmann(c: &mut Criterion) {
    let geom = GeometryPoint::grassmann(2, 2).unwrap();
    let mut group = c.benchmark_group("g22_order3");
    group.sample_size(10);
    group.bench_function("general", |b| b.iter(|| solve_general(black_box(&geom), 3).unwrap()));
    group.bench_function("recurrence", |b| b.iter(|| solve_g22(black_box(3)).unwrap()));
    group.finish();
}

fn permanents(c: &mut Criterion) {
    let mut group = c.benchmark_group("permanent");
    for n in [4usize, 6, 8] {
        let m = Matrix::from_fn(n, n, |i, j| HRational::from_int(((i * 7 + j * 3) % 5) as i64 - 2));
        group.bench_with_input(BenchmarkId::new("naive", n), &m, |b, m| b.iter(|| naive(black_box(m))));
        group.bench_with_input(BenchmarkId::new("ryser", n), &m, |b, m| b.iter(|| ryser(black_box(m))));
    }
    group.finish();
}

criterion_group!(benches, cpn_tables, grassmann, permanents);
criterion_main!(benches);
