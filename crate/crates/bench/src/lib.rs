//! Criterion benchmarks for the holonomy and dynamics pipelines live in
//! `benches/`. This library only provides the shared fixtures.

use std::f64::consts::FRAC_PI_4;

use hqc_core::{gate1_schedule, LoopSchedule, WedgeOverrides};

/// Gate-1 schedule at the reference drive (`Ω = 0.02 rad/fs`, 7.5 ps).
pub fn gate1_fixture(n_samples: usize) -> LoopSchedule {
    let overrides = WedgeOverrides {
        n_samples: Some(n_samples),
        ..Default::default()
    };
    gate1_schedule(FRAC_PI_4, 0.02, 7500.0, &overrides).expect("valid gate-1 schedule")
}
