use criterion::{criterion_group, criterion_main, Criterion};
use hqc_bench::gate1_fixture;
use hqc_core::{evolve, Level, Model, StateVector};

fn gate1_evolution(c: &mut Criterion) {
    let schedule = gate1_fixture(10_000);
    let psi0 = StateVector::basis(Level::Eplus);
    let mut group = c.benchmark_group("evolve");
    group.sample_size(10);
    group.bench_function("gate1_paper_drive", |b| {
        b.iter(|| evolve(&schedule, &Model::Single, &psi0, 0.75).unwrap())
    });
    group.finish();
}

criterion_group!(benches, gate1_evolution);
criterion_main!(benches);
