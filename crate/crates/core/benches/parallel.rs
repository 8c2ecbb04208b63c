//! Parallel vs sequential wall time on the two fan-out workloads: conormal
//! freeness degrees (independent per degree) and resolution certification
//! (independent per chart).  Run with the default features for the rayon
//! path; `--no-default-features` turns both arms sequential, which is the
//! correctness baseline.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use mspec_core::lattice::LatticeVector;
use mspec_core::monoid::{MonoidIdeal, PointedMonoid};
use mspec_core::scheme::{fan_to_scheme, resolve, Fan, ResolveOptions};
use mspec_core::{ASet, Cone};

fn v(coords: &[i64]) -> LatticeVector {
    LatticeVector::from_i64(coords)
}

fn wide_monoid() -> (PointedMonoid, MonoidIdeal) {
    let a = PointedMonoid::new(
        3,
        vec![v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1]), v(&[1, 1, 1])],
        vec![],
        vec![],
    )
    .unwrap();
    let ideal = MonoidIdeal::new(&a, vec![v(&[1, 0, 0]), v(&[0, 1, 1])]).unwrap();
    (a, ideal)
}

fn staircase(n: i64) -> Fan {
    Fan::new(2, vec![Cone::new(2, vec![v(&[1, 0]), v(&[1, n])]).unwrap()]).unwrap()
}

fn bench_normal_flatness(c: &mut Criterion) {
    let (a, ideal) = wide_monoid();
    let mut group = c.benchmark_group("normal_flatness");
    group.sample_size(10);
    for (label, parallel) in [("parallel", true), ("sequential", false)] {
        group.bench_with_input(BenchmarkId::new("n_max_6", label), &parallel, |b, &p| {
            b.iter(|| ASet::is_normally_flat(&a, &ideal, 6, None, p).unwrap());
        });
    }
    group.finish();
}

fn bench_resolution(c: &mut Criterion) {
    let fan = staircase(6);
    let x = fan_to_scheme(&fan).unwrap();
    let mut group = c.benchmark_group("resolution");
    group.sample_size(10);
    for (label, parallel) in [("parallel", true), ("sequential", false)] {
        group.bench_with_input(BenchmarkId::new("staircase_6", label), &parallel, |b, &p| {
            let opts = ResolveOptions { parallel: p, ..ResolveOptions::default() };
            b.iter(|| resolve(&x, &opts).unwrap());
        });
    }
    group.finish();
}

criterion_group!(benches, bench_normal_flatness, bench_resolution);
criterion_main!(benches);
