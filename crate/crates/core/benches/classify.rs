//! Compares serial and rayon-parallel grid classification, plus the raw
//! orbit-iteration throughput they are built on.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use pldyn::classify::{classify_transitive_with, ClassifyOptions, Exec, OpenSetGrid};
use pldyn::family::FamilyKind;
use pldyn::interval::{rat, Interval, IntervalSet};
use pldyn::ndsys::MapSequence;
use pldyn::plmap::PLMap;

fn tent() -> PLMap {
    PLMap::new(vec![
        (rat(0, 1), rat(0, 1)),
        (rat(1, 2), rat(1, 1)),
        (rat(1, 1), rat(0, 1)),
    ])
    .unwrap()
}

fn bench_classify(c: &mut Criterion) {
    let seq = MapSequence::constant(tent());
    let grid = OpenSetGrid::new(3).unwrap();
    let fam = FamilyKind::Infinite;
    let horizon = 300;

    let mut group = c.benchmark_group("classify_transitive_depth3");
    group.sample_size(10);
    group.bench_function("serial", |b| {
        b.iter_batched(
            || (),
            |_| {
                classify_transitive_with(
                    &seq,
                    &fam,
                    &grid,
                    horizon,
                    &ClassifyOptions { exec: Exec::Serial },
                )
            },
            BatchSize::SmallInput,
        )
    });
    group.bench_function("parallel", |b| {
        b.iter_batched(
            || (),
            |_| {
                classify_transitive_with(
                    &seq,
                    &fam,
                    &grid,
                    horizon,
                    &ClassifyOptions { exec: Exec::Parallel },
                )
            },
            BatchSize::SmallInput,
        )
    });
    group.finish();
}

fn bench_orbit(c: &mut Criterion) {
    let seq = MapSequence::constant(tent());
    let u: IntervalSet = Interval::open(rat(1, 8), rat(2, 8)).unwrap().into();
    c.bench_function("orbit_images_1000", |b| {
        b.iter(|| seq.orbit_images(&u, 1000));
    });
}

criterion_group!(benches, bench_classify, bench_orbit);
criterion_main!(benches);
