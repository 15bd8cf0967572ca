//! Time-dependent Schrödinger dynamics along a control loop and the gate
//! reproduction runs built on it.
//!
//! Integration is classic fixed-step RK4 on `i dψ/dt = H(t)ψ` with the
//! control angles interpolated linearly between schedule samples. The norm is
//! never renormalized; its drift is reported and bounded.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonians::{BiexcitonShift, Model};
use crate::holonomy::{dark_frames, predicted_gate, wilson_line, HolonomyResult, PredictedKind};
use crate::loops::{gate1_schedule, gate2_schedule, two_qubit_schedule, GateKind, LoopSchedule, WedgeLoopSpec, WedgeOverrides};
use crate::output::{complex_matrix, fmt_float};
use crate::quantum::{distance_up_to_phase, Level, StateVector, System, C64};

/// `dt ≤ STEP_PER_GAP / |Ω|_max`.
pub const STEP_PER_GAP: f64 = 0.05;
/// `dt ≤ T_ad / MIN_STEPS`.
pub const MIN_STEPS: f64 = 1.0e4;
/// Norm drift above this aborts a run.
pub const MAX_NORM_DRIFT: f64 = 1e-6;
/// Overlap magnitude below which the `E⁺E⁺` phase is left undefined.
pub const DEFAULT_PHASE_THRESHOLD: f64 = 1e-3;
/// Rows kept in a trace when no stride is given.
pub const DEFAULT_TRACE_ROWS: usize = 2000;

/// Largest admissible step for `schedule`.
pub fn max_time_step(schedule: &LoopSchedule) -> f64 {
    let by_gap = STEP_PER_GAP / schedule.max_rabi();
    let by_duration = schedule.total_duration() / MIN_STEPS;
    by_gap.min(by_duration)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// Requested step in fs; `None` uses [`max_time_step`].
    pub dt: Option<f64>,
    /// Record every `stride`-th step; `None` keeps about
    /// [`DEFAULT_TRACE_ROWS`] rows.
    pub stride: Option<usize>,
    pub phase_threshold: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            dt: None,
            stride: None,
            phase_threshold: DEFAULT_PHASE_THRESHOLD,
        }
    }
}

/// Populations, norm and (for two dots) the `E⁺E⁺` phase along a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationTrace {
    pub system: System,
    pub times: Vec<f64>,
    /// One series per basis level, in basis order.
    pub populations: Vec<Vec<f64>>,
    pub norm: Vec<f64>,
    /// `Arg⟨Ψ(t)|E⁺E⁺⟩`, `None` where the overlap is below threshold.
    /// Only recorded for two-dot runs.
    pub phase_plus: Option<Vec<Option<f64>>>,
    /// Maximum over every integration step, not only recorded rows.
    pub population_max: Vec<f64>,
    /// Maximum population outside the instantaneous dark space.
    pub leakage_max: f64,
    pub norm_drift: f64,
    pub dt: f64,
    pub steps: usize,
}

impl SimulationTrace {
    pub fn population(&self, level: Level) -> &[f64] {
        &self.populations[level.index()]
    }

    pub fn max_population(&self, level: Level) -> f64 {
        self.population_max[level.index()]
    }

    /// Columns `t_fs`, `pop_<label>` in basis order, `norm`, `phi_plus`
    /// (empty where undefined or not recorded).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_fs");
        for l in self.system.levels() {
            let _ = write!(out, ",pop_{}", l.name());
        }
        out.push_str(",norm,phi_plus\n");
        for (k, t) in self.times.iter().enumerate() {
            out.push_str(&fmt_float(*t));
            for series in &self.populations {
                out.push(',');
                out.push_str(&fmt_float(series[k]));
            }
            out.push(',');
            out.push_str(&fmt_float(self.norm[k]));
            out.push(',');
            if let Some(Some(p)) = self.phase_plus.as_ref().map(|v| v[k]) {
                out.push_str(&fmt_float(p));
            }
            out.push('\n');
        }
        out
    }
}

struct Propagation {
    states: DMatrix<C64>,
    steps: usize,
    dt: f64,
    norm_drift: f64,
}

fn check_step(schedule: &LoopSchedule, dt: f64) -> Result<f64> {
    let limit = max_time_step(schedule);
    if !(dt > 0.0 && dt <= limit * (1.0 + 1e-12)) {
        return Err(Error::InvalidTimeStep { dt, limit });
    }
    Ok(dt)
}

/// RK4 on every column of `states`. `observe` sees the step index, time,
/// states and Hamiltonian after each step (and once at `t = 0`).
fn propagate(
    schedule: &LoopSchedule,
    model: &Model,
    mut states: DMatrix<C64>,
    dt: f64,
    mut observe: impl FnMut(usize, f64, &DMatrix<C64>, &DMatrix<C64>),
) -> Result<Propagation> {
    let dt = check_step(schedule, dt)?;
    let total = schedule.total_duration();
    let steps = (total / dt).ceil() as usize;
    let h = total / steps as f64;
    let minus_i = C64::new(0.0, -1.0);

    let hamiltonian = |t: f64| -> Result<DMatrix<C64>> { Ok(model.build(&schedule.control_at(t)?)?.matrix().clone()) };

    let mut h_start = hamiltonian(0.0)?;
    observe(0, 0.0, &states, &h_start);
    let mut norm_drift = 0.0f64;
    for n in 0..steps {
        let t = n as f64 * h;
        let t_next = if n + 1 == steps { total } else { (n + 1) as f64 * h };
        let h_mid = hamiltonian(t + 0.5 * h)?;
        let h_end = hamiltonian(t_next)?;

        let k1 = (&h_start * &states) * minus_i;
        let k2 = (&h_mid * (&states + &k1 * C64::new(0.5 * h, 0.0))) * minus_i;
        let k3 = (&h_mid * (&states + &k2 * C64::new(0.5 * h, 0.0))) * minus_i;
        let k4 = (&h_end * (&states + &k3 * C64::new(h, 0.0))) * minus_i;
        states += (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0);

        for col in states.column_iter() {
            norm_drift = norm_drift.max((col.norm() - 1.0).abs());
        }
        observe(n + 1, t_next, &states, &h_end);
        h_start = h_end;
    }
    if norm_drift > MAX_NORM_DRIFT {
        return Err(Error::StepSizeTooLarge { drift: norm_drift });
    }
    Ok(Propagation {
        states,
        steps,
        dt: h,
        norm_drift,
    })
}

/// Evolves `psi0` along `schedule` with a step of at most `dt` fs.
pub fn evolve(schedule: &LoopSchedule, model: &Model, psi0: &StateVector, dt: f64) -> Result<(StateVector, SimulationTrace)> {
    evolve_with(
        schedule,
        model,
        psi0,
        &EvolveOptions {
            dt: Some(dt),
            ..Default::default()
        },
    )
}

pub fn evolve_with(
    schedule: &LoopSchedule,
    model: &Model,
    psi0: &StateVector,
    options: &EvolveOptions,
) -> Result<(StateVector, SimulationTrace)> {
    let system = model.system();
    if psi0.system() != system {
        return Err(Error::DimensionMismatch {
            expected: system.dim(),
            got: psi0.dim(),
        });
    }
    let dt = options.dt.unwrap_or_else(|| max_time_step(schedule));
    let expected_steps = (schedule.total_duration() / dt).ceil().max(1.0) as usize;
    let stride = options
        .stride
        .unwrap_or_else(|| expected_steps.div_ceil(DEFAULT_TRACE_ROWS))
        .max(1);
    let dim = system.dim();
    let ground = system.ground().index();
    let pp = (system == System::TwoExciton).then(|| Level::EplusEplus.index());

    let mut times = Vec::new();
    let mut populations = vec![Vec::new(); dim];
    let mut norm = Vec::new();
    let mut phase_plus = pp.map(|_| Vec::new());
    let mut population_max = vec![0.0f64; dim];
    let mut leakage_max = 0.0f64;

    let init = DMatrix::from_column_slice(dim, 1, psi0.amplitudes().as_slice());
    let prop = propagate(schedule, model, init, dt, |n, t, states, h| {
        let psi = states.column(0);
        let pops: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
        for (m, p) in population_max.iter_mut().zip(&pops) {
            *m = m.max(*p);
        }
        let col = h.column(ground);
        let bright_norm = col.norm();
        let bright = if bright_norm > 0.0 {
            col.dotc(&psi).norm_sqr() / (bright_norm * bright_norm)
        } else {
            0.0
        };
        leakage_max = leakage_max.max(pops[ground] + bright);

        if n % stride == 0 || n == expected_steps {
            times.push(t);
            for (series, p) in populations.iter_mut().zip(&pops) {
                series.push(*p);
            }
            norm.push(psi.norm());
            if let (Some(idx), Some(series)) = (pp, phase_plus.as_mut()) {
                // ⟨Ψ|E⁺E⁺⟩ is the conjugate of the amplitude.
                let overlap = psi[idx].conj();
                series.push((overlap.norm() >= options.phase_threshold).then(|| overlap.arg()));
            }
        }
    })?;

    let final_state = StateVector::from_vector_unchecked(system, prop.states.column(0).into_owned())?;
    let trace = SimulationTrace {
        system,
        times,
        populations,
        norm,
        phase_plus,
        population_max,
        leakage_max,
        norm_drift: prop.norm_drift,
        dt: prop.dt,
        steps: prop.steps,
    };
    Ok((final_state, trace))
}

/// Dynamical versus geometric dark-space unitary for one schedule.
#[derive(Debug, Clone, Serialize)]
pub struct HolonomyComparison {
    /// `⟨D_α(T)|U(T,0)|D_β(0)⟩` from integrating every start dark vector.
    #[serde(serialize_with = "complex_matrix::serialize")]
    pub dynamic: DMatrix<C64>,
    pub geometric: HolonomyResult,
    /// `max|U_dyn − e^{iχ}U_wilson|` with the best global phase `χ`.
    pub distance: f64,
    pub norm_drift: f64,
}

/// Integrates the computational dark basis along `schedule`, projects onto
/// the end frame and compares with the Wilson line up to a global phase.
pub fn dynamics_vs_holonomy(schedule: &LoopSchedule, model: &Model, dt: f64) -> Result<HolonomyComparison> {
    let frames = dark_frames(schedule, model)?;
    let geometric = wilson_line(&frames)?;
    let start = frames[0].vectors.clone();
    let prop = propagate(schedule, model, start.clone(), dt, |_, _, _, _| {})?;
    // The loop is closed, so the end dark space is spanned by the start
    // frame, which is also the basis of the Wilson line.
    let dynamic = start.adjoint() * &prop.states;
    let distance = distance_up_to_phase(&dynamic, geometric.unitary.matrix());
    Ok(HolonomyComparison {
        dynamic,
        geometric,
        distance,
        norm_drift: prop.norm_drift,
    })
}

/// Summary of one gate run.
#[derive(Debug, Clone, Serialize)]
pub struct FidelityReport {
    pub gate: GateKind,
    /// `|⟨target|ψ(T_ad)⟩|²`.
    pub fidelity: f64,
    /// Gate 1: phase acquired by `E⁺` relative to the decoupled `E⁻`.
    /// Gate 2: global phase of `ψ(T_ad)` relative to the target.
    /// Two dots: `Arg⟨E⁺E⁺|ψ(T_ad)⟩`.
    pub final_phase: Option<f64>,
    pub leakage_max: f64,
    pub ground_max: f64,
    pub holonomy_distance: Option<f64>,
    /// Same phase as `final_phase`, read off the Wilson line.
    pub geometric_phase: Option<f64>,
    pub norm_drift: f64,
    pub t_ad: f64,
    pub dt: f64,
    pub steps: usize,
}

#[derive(Debug, Clone)]
pub struct GateRun {
    pub schedule: LoopSchedule,
    pub final_state: StateVector,
    pub target: StateVector,
    pub trace: SimulationTrace,
    pub report: FidelityReport,
    pub holonomy: Option<HolonomyComparison>,
}

/// Knobs shared by the gate runs.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub evolve: EvolveOptions,
    pub wedge: WedgeOverrides,
    /// Also integrate the full dark basis and compare with the Wilson line.
    pub compare_holonomy: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            evolve: EvolveOptions::default(),
            wedge: WedgeOverrides::default(),
            compare_holonomy: true,
        }
    }
}

fn qubit_amplitudes(psi0: &StateVector) -> Result<[C64; 2]> {
    if psi0.system() != System::SingleExciton {
        return Err(Error::InvalidState("single-qubit gates act on single-exciton states".into()));
    }
    let outside = psi0.population(Level::G) + psi0.population(Level::E0);
    if outside > 1e-8 {
        return Err(Error::InvalidState(format!(
            "initial state has weight {outside:e} outside span{{E-, E+}}"
        )));
    }
    Ok([psi0.amplitude(Level::Eminus), psi0.amplitude(Level::Eplus)])
}

fn apply_qubit_gate(kind: PredictedKind, phase: f64, q: [C64; 2]) -> Result<StateVector> {
    let u = predicted_gate(kind, phase);
    let m = u.matrix();
    let out = [m[(0, 0)] * q[0] + m[(0, 1)] * q[1], m[(1, 0)] * q[0] + m[(1, 1)] * q[1]];
    let mut amps = vec![C64::new(0.0, 0.0); 4];
    amps[Level::Eminus.index()] = out[0];
    amps[Level::Eplus.index()] = out[1];
    StateVector::normalized(System::SingleExciton, amps)
}

fn finish(
    schedule: LoopSchedule,
    model: &Model,
    psi0: &StateVector,
    target: StateVector,
    options: &RunOptions,
    phase: impl Fn(&StateVector, &StateVector) -> Option<f64>,
    geometric_phase: impl Fn(&HolonomyResult) -> Option<f64>,
) -> Result<GateRun> {
    let (final_state, trace) = evolve_with(&schedule, model, psi0, &options.evolve)?;
    let holonomy = if options.compare_holonomy {
        Some(dynamics_vs_holonomy(&schedule, model, trace.dt)?)
    } else {
        None
    };
    let fidelity = target.inner(&final_state)?.norm_sqr();
    let report = FidelityReport {
        gate: schedule.gate_kind(),
        fidelity,
        final_phase: phase(psi0, &final_state),
        leakage_max: trace.leakage_max,
        ground_max: trace.max_population(model.system().ground()),
        holonomy_distance: holonomy.as_ref().map(|h| h.distance),
        geometric_phase: holonomy.as_ref().and_then(|h| geometric_phase(&h.geometric)),
        norm_drift: trace.norm_drift,
        t_ad: schedule.total_duration(),
        dt: trace.dt,
        steps: trace.steps,
    };
    Ok(GateRun {
        schedule,
        final_state,
        target,
        trace,
        report,
        holonomy,
    })
}

/// Gate 1 with phase `φ₁`: target `exp(iφ₁|E⁺⟩⟨E⁺|)·ψ₀`.
pub fn run_gate1(phi1: f64, omega: f64, t_ad: f64, psi0: &StateVector, options: &RunOptions) -> Result<GateRun> {
    let q = qubit_amplitudes(psi0)?;
    let schedule = gate1_schedule(phi1, omega, t_ad, &options.wedge)?;
    let target = apply_qubit_gate(PredictedKind::Gate1, phi1, q)?;
    finish(
        schedule,
        &Model::Single,
        psi0,
        target,
        options,
        |start, end| {
            // E⁻ never couples (Ω₋ = 0), so it is the phase reference.
            let level = if start.amplitude(Level::Eplus).norm() > 1e-6 {
                Level::Eplus
            } else {
                Level::Eminus
            };
            Some((end.amplitude(level) * start.amplitude(level).conj()).arg())
        },
        |w| Some(crate::holonomy::relative_phase(&w.unitary)),
    )
}

/// Gate 2 with angle `φ₂`: target `exp(iφ₂σ_y)·ψ₀`, up to global phase.
pub fn run_gate2(phi2: f64, omega: f64, t_ad: f64, psi0: &StateVector, options: &RunOptions) -> Result<GateRun> {
    let q = qubit_amplitudes(psi0)?;
    let schedule = gate2_schedule(phi2, omega, t_ad, &options.wedge)?;
    let target = apply_qubit_gate(PredictedKind::Gate2, phi2, q)?;
    let reference = target.clone();
    finish(
        schedule,
        &Model::Single,
        psi0,
        target,
        options,
        move |_, end| reference.inner(end).ok().map(|z| z.arg()),
        |w| Some(crate::holonomy::sigma_y_angle(&w.unitary)),
    )
}

/// Two-dot controlled phase on `E⁺E⁺`.
pub fn run_two_qubit(
    spec: &WedgeLoopSpec,
    omega_tilde: f64,
    shift: &BiexcitonShift,
    t_ad: f64,
    psi0: &StateVector,
    options: &RunOptions,
) -> Result<GateRun> {
    let schedule = two_qubit_schedule(spec, omega_tilde, shift, t_ad)?;
    let target = StateVector::basis(Level::EplusEplus);
    let pp = Level::EplusEplus.index() - 2;
    finish(
        schedule,
        &Model::TwoExciton(*shift),
        psi0,
        target,
        options,
        |_, end| Some(end.amplitude(Level::EplusEplus).arg()),
        move |w| Some(w.unitary.matrix()[(pp, pp)].arg()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loops::{ControlMap, Ramp, SphereAngles};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn zero_hamiltonian_keeps_state() {
        let s = LoopSchedule::stationary(ControlMap::Gate1, 0.0, SphereAngles::NORTH, 50.0, 10).unwrap();
        let psi0 = StateVector::normalized(System::SingleExciton, vec![c(0.1, 0.2), c(0.3, 0.0), c(0.0, -0.5), c(0.4, 0.4)]).unwrap();
        let (psi, trace) = evolve(&s, &Model::Single, &psi0, 5e-3).unwrap();
        assert_eq!(psi, psi0);
        assert_eq!(trace.norm_drift, (psi0.norm_sqr().sqrt() - 1.0).abs());
    }

    #[test]
    fn dark_state_is_stationary() {
        let s = LoopSchedule::stationary(ControlMap::Gate1, 0.02, SphereAngles::NORTH, 500.0, 10).unwrap();
        let psi0 = StateVector::basis(Level::Eplus);
        let (psi, _) = evolve(&s, &Model::Single, &psi0, 0.05).unwrap();
        assert_eq!(psi, psi0);
    }

    /// Rabi oracle in the `{G, E⁰}` block: `H = −Ω(|E⁰⟩⟨G| + h.c.)` gives
    /// `ψ(t) = cos(Ωt)|G⟩ + i sin(Ωt)|E⁰⟩`.
    fn rabi_run(omega: f64, t: f64, dt: f64) -> StateVector {
        let s = LoopSchedule::stationary(ControlMap::Gate1, omega, SphereAngles::NORTH, t, 2).unwrap();
        evolve(&s, &Model::Single, &StateVector::basis(Level::G), dt).unwrap().0
    }

    fn max_diff(a: &StateVector, b: &[C64]) -> f64 {
        a.amplitudes().iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    fn rabi_exact(omega: f64, t: f64) -> [C64; 4] {
        let (sn, cs) = (omega * t).sin_cos();
        [c(cs, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, sn)]
    }

    #[test]
    fn half_rabi_cycle_transfers_to_e0() {
        let t = PI / (2.0 * 0.02);
        let psi = rabi_run(0.02, t, t / 1e4);
        assert!((psi.population(Level::E0) - 1.0).abs() < 1e-10);
        assert!(max_diff(&psi, &rabi_exact(0.02, t)) < 1e-10);
    }

    #[test]
    fn rk4_is_fourth_order() {
        // Strong drive so the truncation error sits well above roundoff at
        // the largest admissible step.
        let (omega, t, dt) = (0.4, 1000.0, 0.1);
        let coarse = rabi_run(omega, t, dt);
        let fine = rabi_run(omega, t, dt / 2.0);
        let reference = rabi_run(omega, t, dt / 4.0);
        let reference = reference.amplitudes().as_slice().to_vec();
        let ratio = max_diff(&coarse, &reference) / max_diff(&fine, &reference);
        assert!(ratio >= 8.0, "reference ratio {ratio}");
        let exact = rabi_exact(omega, t);
        let ratio = max_diff(&coarse, &exact) / max_diff(&fine, &exact);
        assert!(ratio >= 8.0, "analytic ratio {ratio}");
    }

    #[test]
    fn oversized_step_rejected() {
        let s = LoopSchedule::stationary(ControlMap::Gate1, 0.02, SphereAngles::NORTH, 1000.0, 2).unwrap();
        assert!(matches!(
            evolve(&s, &Model::Single, &StateVector::basis(Level::G), 3.0),
            Err(Error::InvalidTimeStep { .. })
        ));
    }

    #[test]
    fn trace_bookkeeping() {
        let run = run_gate1(
            FRAC_PI_4,
            0.02,
            2000.0,
            &StateVector::basis(Level::Eplus),
            &RunOptions {
                compare_holonomy: false,
                ..Default::default()
            },
        )
        .unwrap();
        let tr = &run.trace;
        assert_eq!(tr.times[0], 0.0);
        assert_eq!(*tr.times.last().unwrap(), 2000.0);
        assert!(tr.phase_plus.is_none());
        for k in 0..tr.times.len() {
            let sum: f64 = tr.populations.iter().map(|p| p[k]).sum();
            assert!((sum - tr.norm[k].powi(2)).abs() < 1e-8);
        }
        let csv = tr.to_csv();
        assert!(csv.starts_with("t_fs,pop_G,pop_Eminus,pop_Eplus,pop_E0,norm,phi_plus\n"));
        assert_eq!(csv.lines().count(), tr.times.len() + 1);
    }

    #[test]
    fn gate1_rejects_state_outside_qubit() {
        let r = run_gate1(FRAC_PI_4, 0.02, 2000.0, &StateVector::basis(Level::E0), &RunOptions::default());
        assert!(matches!(r, Err(Error::InvalidState(_))));
    }

    #[test]
    fn frozen_schedule_dynamics_equal_holonomy() {
        let s = LoopSchedule::stationary(ControlMap::Gate1, 0.02, SphereAngles::NORTH, 500.0, 50).unwrap();
        let cmp = dynamics_vs_holonomy(&s, &Model::Single, 0.05).unwrap();
        assert!(cmp.distance <= 1e-9);
    }

    #[test]
    fn gate2_full_turn_is_minus_identity() {
        let run = run_gate2(PI, 0.02, 7500.0, &StateVector::basis(Level::Eplus), &RunOptions::default()).unwrap();
        assert!(run.report.fidelity >= 0.99, "{:?}", run.report);
        let amp = run.final_state.amplitude(Level::Eplus);
        assert!(amp.re < -0.99, "{amp}");
    }

    #[test]
    fn gate1_leaves_eminus_alone() {
        let run = run_gate1(FRAC_PI_4, 0.02, 7500.0, &StateVector::basis(Level::Eminus), &RunOptions::default()).unwrap();
        assert!(run.report.fidelity >= 0.999);
        assert!(run.trace.population(Level::Eminus).iter().all(|p| *p >= 0.999));
    }

    #[test]
    fn holonomy_distance_shrinks_with_duration() {
        let psi0 = StateVector::basis(Level::Eplus);
        let opts = RunOptions::default();
        for gate in [GateKind::Gate1, GateKind::Gate2] {
            let d: Vec<f64> = [1.0, 2.0, 4.0, 8.0]
                .iter()
                .map(|k| {
                    let t = 7500.0 * k;
                    let run = match gate {
                        GateKind::Gate1 => run_gate1(FRAC_PI_4, 0.02, t, &psi0, &opts),
                        _ => run_gate2(FRAC_PI_2, 0.02, t, &psi0, &opts),
                    };
                    run.unwrap().report.holonomy_distance.unwrap()
                })
                .collect();
            assert!(d.windows(2).all(|w| w[1] <= w[0]), "{gate:?}: {d:?}");
        }
    }

    #[test]
    fn short_two_qubit_duration_rejected() {
        let shift = BiexcitonShift::from_mev(5.0).unwrap();
        let spec = WedgeLoopSpec::new(FRAC_PI_2, FRAC_PI_2);
        let r = run_two_qubit(&spec, shift.rad_per_fs() / 5.0, &shift, 1e4, &StateVector::basis(Level::EplusEplus), &RunOptions::default());
        assert!(matches!(r, Err(Error::Adiabaticity { .. })));
    }

    #[test]
    fn phase_plus_marked_where_overlap_small() {
        let shift = BiexcitonShift::from_mev(5.0).unwrap();
        let spec = crate::holonomy::controlled_phase_wedge(FRAC_PI_2, Ramp::SmoothStep, 2000).unwrap();
        let opts = RunOptions {
            compare_holonomy: false,
            ..Default::default()
        };
        let run = run_two_qubit(&spec, shift.rad_per_fs() / 5.0, &shift, 2e5, &StateVector::basis(Level::E0Eplus), &opts).unwrap();
        let tr = &run.trace;
        let phases = tr.phase_plus.as_ref().unwrap();
        let pops = tr.population(Level::EplusEplus);
        assert!(phases[0].is_none());
        assert!(phases.iter().any(|p| p.is_some()));
        for (p, pop) in phases.iter().zip(pops) {
            assert_eq!(p.is_some(), pop.sqrt() >= DEFAULT_PHASE_THRESHOLD);
        }
        let csv = tr.to_csv();
        assert!(csv.lines().nth(1).unwrap().ends_with(','));
    }
}
