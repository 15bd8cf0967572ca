use std::f64::consts::FRAC_PI_2;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hqc_bench::gate1_fixture;
use hqc_core::holonomy::holonomy;
use hqc_core::{controlled_phase_wedge, solid_angle, two_qubit_schedule, BiexcitonShift, Model, Ramp};

fn wilson_single(c: &mut Criterion) {
    let mut group = c.benchmark_group("wilson_line_single");
    for n in [1_000usize, 10_000] {
        let schedule = gate1_fixture(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &schedule, |b, s| {
            b.iter(|| holonomy(s, &Model::Single).unwrap())
        });
    }
    group.finish();
}

fn wilson_two_exciton(c: &mut Criterion) {
    let shift = BiexcitonShift::from_mev(5.0).unwrap();
    let spec = controlled_phase_wedge(FRAC_PI_2, Ramp::SmoothStep, 10_000).unwrap();
    let schedule = two_qubit_schedule(&spec, shift.rad_per_fs() / 5.0, &shift, 8.0e5).unwrap();
    let model = Model::TwoExciton(shift);
    c.bench_function("wilson_line_two_exciton_10k", |b| b.iter(|| holonomy(&schedule, &model).unwrap()));
}

fn solid_angle_oracle(c: &mut Criterion) {
    let angles = gate1_fixture(10_000).angles();
    c.bench_function("solid_angle_10k", |b| b.iter(|| solid_angle(&angles).unwrap()));
}

criterion_group!(benches, wilson_single, wilson_two_exciton, solid_angle_oracle);
criterion_main!(benches);
