//! Simulation of adiabatic holonomic quantum gates on excitonic level schemes.
//!
//! A single quantum dot driven on three degenerate light-hole transitions
//! (`|G⟩ → |E⁻⟩, |E⁺⟩, |E⁰⟩`) has a two-dimensional space of dark states;
//! two dipole-coupled dots driven by two-photon pulses have a
//! three-dimensional one. Moving the laser amplitudes around a closed loop
//! transports the dark space onto itself, and the resulting unitary (the
//! holonomy) depends only on the loop geometry.
//!
//! The crate is organised bottom-up:
//!
//! * [`quantum`]: labeled state vectors, Hermitian and unitary operators.
//! * [`hamiltonians`]: control points and the one- and two-dot interaction
//!   Hamiltonians.
//! * [`loops`]: closed wedge-shaped control loops and gate schedules.
//! * [`holonomy`]: dark frames, the discrete Wilson line, the solid-angle
//!   oracle and the analytic gate predictions.
//! * [`dynamics`]: fixed-step RK4 integration of the Schrödinger equation and
//!   the gate reproduction runs.
//! * [`output`]: deterministic CSV/JSON formatting.
//!
//! Units: `ħ = 1`, time in femtoseconds, frequencies and energies in rad/fs.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod hamiltonians;
pub mod holonomy;
pub mod loops;
pub mod output;
pub mod quantum;
pub mod units;

pub use dynamics::{
    dynamics_vs_holonomy, evolve, run_gate1, run_gate2, run_two_qubit, FidelityReport, GateRun,
    HolonomyComparison, SimulationTrace,
};
pub use error::{Error, Result};
pub use hamiltonians::{build_single, build_two_exciton, BiexcitonShift, ControlPoint, Model};
pub use holonomy::{
    controlled_phase_wedge, dark_frames, predicted_gate, predicted_two_qubit, solid_angle, wilson_line, DarkFrame,
    HolonomyResult, PredictedKind,
};
pub use loops::{
    gate1_schedule, gate2_schedule, two_qubit_schedule, wedge_path, ControlMap, GateKind,
    LoopSample, LoopSchedule, Ramp, SphereAngles, WedgeLoopSpec, WedgeOverrides,
};
pub use quantum::{HermitianOperator, Level, StateVector, System, UnitaryOperator, C64};
