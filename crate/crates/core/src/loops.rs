//! Closed control loops on the `(θ, φ)` sphere and the gate schedules built
//! from them.
//!
//! Every loop is a "wedge": down the meridian `φ = 0` to `θ_max`, along the
//! parallel `θ = θ_max` through `φ_sweep`, and back up to the pole. It starts
//! and ends at `θ = 0`, where only `Ω₀` is on and the dark states are
//! computational basis states. Its solid angle is `φ_sweep·(1 − cos θ_max)`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::{BiexcitonShift, ControlPoint};
use crate::output::fmt_float;
use crate::quantum::C64;

pub const MIN_SAMPLES: usize = 100;
pub const DEFAULT_SAMPLES: usize = 10_000;
pub const CLOSURE_TOLERANCE: f64 = 1e-12;

/// Below this `T_ad·Ω̃²/δ` a two-qubit schedule is rejected.
pub const MIN_TWO_QUBIT_ADIABATICITY: f64 = 50.0;
/// Below this `T_ad·Ω̃²/δ` a two-qubit schedule is accepted with a warning.
pub const WARN_TWO_QUBIT_ADIABATICITY: f64 = 100.0;

const MIN_SOLID_ANGLE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereAngles {
    pub theta: f64,
    /// Unwrapped azimuth.
    pub phi: f64,
}

impl SphereAngles {
    pub const NORTH: SphereAngles = SphereAngles { theta: 0.0, phi: 0.0 };

    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    fn lerp(a: SphereAngles, b: SphereAngles, s: f64) -> SphereAngles {
        SphereAngles {
            theta: a.theta + (b.theta - a.theta) * s,
            phi: a.phi + (b.phi - a.phi) * s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ramp {
    Linear,
    /// `3τ² − 2τ³` per leg: zero angular velocity at the corners.
    #[default]
    #[serde(alias = "smoothstep")]
    SmoothStep,
}

impl Ramp {
    pub fn ease(self, tau: f64) -> f64 {
        match self {
            Ramp::Linear => tau,
            Ramp::SmoothStep => tau * tau * (3.0 - 2.0 * tau),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WedgeLoopSpec {
    pub theta_max: f64,
    pub phi_sweep: f64,
    pub ramp: Ramp,
    pub n_samples: usize,
    /// Traverse the wedge the other way round: down `φ = φ_sweep`, back along
    /// the parallel, up `φ = 0`. Flips the sign of the solid angle.
    #[serde(default)]
    pub reversed: bool,
}

impl WedgeLoopSpec {
    pub fn new(theta_max: f64, phi_sweep: f64) -> Self {
        Self {
            theta_max,
            phi_sweep,
            ramp: Ramp::SmoothStep,
            n_samples: DEFAULT_SAMPLES,
            reversed: false,
        }
    }

    pub fn with_samples(mut self, n_samples: usize) -> Self {
        self.n_samples = n_samples;
        self
    }

    pub fn with_ramp(mut self, ramp: Ramp) -> Self {
        self.ramp = ramp;
        self
    }

    pub fn reversed(mut self) -> Self {
        self.reversed = !self.reversed;
        self
    }

    /// Oriented solid angle: positive for the forward (eastward) traversal.
    pub fn solid_angle(&self) -> f64 {
        let area = self.phi_sweep * (1.0 - self.theta_max.cos());
        if self.reversed {
            -area
        } else {
            area
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.theta_max == 0.0 || self.phi_sweep == 0.0 {
            return Err(Error::ZeroAreaLoop);
        }
        if !(self.theta_max > 0.0 && self.theta_max <= PI) {
            return Err(Error::InvalidLoop(format!("theta_max {} outside (0, π]", self.theta_max)));
        }
        if !(self.phi_sweep > 0.0 && self.phi_sweep <= TAU + 1e-12) {
            return Err(Error::InvalidLoop(format!("phi_sweep {} outside (0, 2π]", self.phi_sweep)));
        }
        if self.solid_angle().abs() < MIN_SOLID_ANGLE {
            return Err(Error::ZeroAreaLoop);
        }
        if self.n_samples < MIN_SAMPLES {
            return Err(Error::InvalidLoop(format!(
                "n_samples {} below minimum {MIN_SAMPLES}",
                self.n_samples
            )));
        }
        Ok(())
    }
}

/// Optional replacements for the defaults used when a gate schedule solves
/// its wedge from a phase target.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct WedgeOverrides {
    pub theta_max: Option<f64>,
    pub ramp: Option<Ramp>,
    pub n_samples: Option<usize>,
    pub reversed: Option<bool>,
}

/// Samples a wedge loop over `[0, t_ad]`.
///
/// Time and samples are split between the three legs in proportion to arc
/// length on the unit sphere; corners are always sampled exactly. Within a
/// leg the samples are uniform in time and the ramp maps time to position.
pub fn wedge_path(spec: &WedgeLoopSpec, t_ad: f64) -> Result<Vec<(f64, SphereAngles)>> {
    spec.validate()?;
    if !(t_ad > 0.0 && t_ad.is_finite()) {
        return Err(Error::InvalidLoop(format!("duration {t_ad} fs must be positive")));
    }
    let (tm, sweep) = (spec.theta_max, spec.phi_sweep);
    let (phi_down, phi_up) = if spec.reversed { (sweep, 0.0) } else { (0.0, sweep) };
    let corners = [
        SphereAngles::new(0.0, phi_down),
        SphereAngles::new(tm, phi_down),
        SphereAngles::new(tm, phi_up),
        SphereAngles::new(0.0, phi_up),
    ];
    let raw = [tm, sweep * tm.sin(), tm];
    let floor = 1e-9 * raw.iter().sum::<f64>();
    let lengths = raw.map(|l| l.max(floor));
    let total: f64 = lengths.iter().sum();

    let intervals = spec.n_samples - 1;
    let mut counts = lengths.map(|l| ((intervals as f64 * l / total).round() as usize).max(1));
    let assigned: usize = counts[0] + counts[2];
    counts[1] = intervals.saturating_sub(assigned).max(1);

    let mut path = Vec::with_capacity(spec.n_samples);
    path.push((0.0, corners[0]));
    let mut t_start = 0.0;
    for leg in 0..3 {
        let t_end = if leg == 2 {
            t_ad
        } else {
            t_start + t_ad * lengths[leg] / total
        };
        let n = counts[leg];
        for j in 1..=n {
            let tau = j as f64 / n as f64;
            let t = if j == n { t_end } else { t_start + tau * (t_end - t_start) };
            let s = if j == n { 1.0 } else { spec.ramp.ease(tau) };
            path.push((t, SphereAngles::lerp(corners[leg], corners[leg + 1], s)));
        }
        t_start = t_end;
    }
    Ok(path)
}

/// How sphere angles become Rabi frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlMap {
    /// `Ω₋ = 0, Ω₊ = −Ω sin(θ/2) e^{iφ}, Ω₀ = Ω cos(θ/2)`.
    Gate1,
    /// `Ω₋ = Ω sinθ cosφ, Ω₊ = Ω sinθ sinφ, Ω₀ = Ω cosθ`.
    Gate2,
}

impl ControlMap {
    pub fn control_point(self, omega: f64, a: SphereAngles) -> Result<ControlPoint> {
        match self {
            ControlMap::Gate1 => {
                let (s, c) = (a.theta / 2.0).sin_cos();
                ControlPoint::new(
                    C64::new(0.0, 0.0),
                    C64::from_polar(-omega * s, a.phi),
                    C64::new(omega * c, 0.0),
                )
            }
            ControlMap::Gate2 => {
                let (st, ct) = a.theta.sin_cos();
                let (sp, cp) = a.phi.sin_cos();
                ControlPoint::real(omega * st * cp, omega * st * sp, omega * ct)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    Gate1,
    Gate2,
    TwoQubit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoopSample {
    pub t: f64,
    pub cp: ControlPoint,
    pub angles: SphereAngles,
}

/// A sampled closed control loop with time stamps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopSchedule {
    samples: Vec<LoopSample>,
    total_duration: f64,
    gate_kind: GateKind,
    map: ControlMap,
    omega: f64,
}

impl LoopSchedule {
    pub fn from_path(path: &[(f64, SphereAngles)], map: ControlMap, omega: f64, gate_kind: GateKind) -> Result<Self> {
        if path.len() < 2 {
            return Err(Error::InvalidLoop("a schedule needs at least two samples".into()));
        }
        if path[0].0 != 0.0 {
            return Err(Error::InvalidLoop("schedule must start at t = 0".into()));
        }
        if path.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidLoop("sample times must be strictly increasing".into()));
        }
        let samples = path
            .iter()
            .map(|&(t, angles)| {
                Ok(LoopSample {
                    t,
                    cp: map.control_point(omega, angles)?,
                    angles,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let total_duration = path[path.len() - 1].0;
        let schedule = Self {
            samples,
            total_duration,
            gate_kind,
            map,
            omega,
        };
        let defect = schedule.closure_defect();
        if defect > CLOSURE_TOLERANCE {
            return Err(Error::OpenPath(format!("first and last control points differ by {defect:e}")));
        }
        Ok(schedule)
    }

    /// A loop that never moves: `n` samples at fixed angles.
    pub fn stationary(map: ControlMap, omega: f64, angles: SphereAngles, duration: f64, n: usize) -> Result<Self> {
        let path: Vec<_> = (0..n)
            .map(|k| (duration * k as f64 / (n - 1) as f64, angles))
            .collect();
        Self::from_path(&path, map, omega, GateKind::Gate1)
    }

    pub fn samples(&self) -> &[LoopSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn total_duration(&self) -> f64 {
        self.total_duration
    }

    pub fn gate_kind(&self) -> GateKind {
        self.gate_kind
    }

    pub fn map(&self) -> ControlMap {
        self.map
    }

    /// Sphere radius `Ω` of the control map.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn angles(&self) -> Vec<SphereAngles> {
        self.samples.iter().map(|s| s.angles).collect()
    }

    pub fn closure_defect(&self) -> f64 {
        self.samples[0].cp.max_diff(&self.samples[self.samples.len() - 1].cp)
    }

    pub fn max_rabi(&self) -> f64 {
        self.samples.iter().map(|s| s.cp.magnitude()).fold(0.0, f64::max)
    }

    /// Angles at time `t`, linearly interpolated between samples.
    pub fn angles_at(&self, t: f64) -> SphereAngles {
        let t = t.clamp(0.0, self.total_duration);
        let k = self.samples.partition_point(|s| s.t <= t);
        if k == 0 {
            return self.samples[0].angles;
        }
        if k == self.samples.len() {
            return self.samples[k - 1].angles;
        }
        let (a, b) = (&self.samples[k - 1], &self.samples[k]);
        SphereAngles::lerp(a.angles, b.angles, (t - a.t) / (b.t - a.t))
    }

    pub fn control_at(&self, t: f64) -> Result<ControlPoint> {
        self.map.control_point(self.omega, self.angles_at(t))
    }

    /// The same loop traversed backwards in time.
    pub fn reversed(&self) -> Self {
        let t_end = self.total_duration;
        let samples = self
            .samples
            .iter()
            .rev()
            .map(|s| LoopSample { t: t_end - s.t, ..*s })
            .collect();
        Self {
            samples,
            ..self.clone()
        }
    }

    /// This loop followed by `next`, which must start where this one ends.
    pub fn then(&self, next: &LoopSchedule) -> Result<Self> {
        if self.map != next.map || self.omega != next.omega {
            return Err(Error::InvalidLoop("cannot join loops with different control maps".into()));
        }
        let last = self.samples[self.samples.len() - 1];
        if last.cp.max_diff(&next.samples[0].cp) > CLOSURE_TOLERANCE {
            return Err(Error::OpenPath("loops do not meet".into()));
        }
        let mut samples = self.samples.clone();
        samples.extend(next.samples[1..].iter().map(|s| LoopSample {
            t: s.t + self.total_duration,
            ..*s
        }));
        Ok(Self {
            samples,
            total_duration: self.total_duration + next.total_duration,
            ..self.clone()
        })
    }

    /// CSV with columns `t_fs, theta, phi` and the real/imaginary parts of
    /// each Rabi frequency.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "t_fs,theta,phi,re_omega_minus,im_omega_minus,re_omega_plus,im_omega_plus,re_omega_zero,im_omega_zero\n",
        );
        for s in &self.samples {
            let fields = [
                s.t,
                s.angles.theta,
                s.angles.phi,
                s.cp.omega_minus.re,
                s.cp.omega_minus.im,
                s.cp.omega_plus.re,
                s.cp.omega_plus.im,
                s.cp.omega_zero.re,
                s.cp.omega_zero.im,
            ];
            let row: Vec<String> = fields.iter().map(|&x| fmt_float(x)).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

/// Picks wedge parameters enclosing `solid` steradians: `θ_max = π/2` and the
/// matching sweep, falling back to a full `2π` sweep with a deeper `θ_max`
/// when the target needs more than a hemisphere.
fn solve_wedge(solid: f64, target: f64, overrides: &WedgeOverrides, reversed_default: bool) -> Result<WedgeLoopSpec> {
    if solid.abs() < MIN_SOLID_ANGLE {
        return Err(Error::ZeroAreaLoop);
    }
    if !(solid > 0.0) {
        return Err(Error::InvalidLoop(format!("phase target {target} must be positive")));
    }
    if solid >= 2.0 * TAU {
        return Err(Error::UnreachableTarget {
            target,
            solid_angle: solid,
        });
    }
    let (theta_max, phi_sweep) = match overrides.theta_max {
        Some(tm) => {
            let sweep = solid / (1.0 - tm.cos());
            if !(sweep <= TAU) {
                return Err(Error::UnreachableTarget {
                    target,
                    solid_angle: solid,
                });
            }
            (tm, sweep)
        }
        None if solid <= TAU => (FRAC_PI_2, solid),
        None => ((1.0 - solid / TAU).acos(), TAU),
    };
    let spec = WedgeLoopSpec {
        theta_max,
        phi_sweep,
        ramp: overrides.ramp.unwrap_or_default(),
        n_samples: overrides.n_samples.unwrap_or(DEFAULT_SAMPLES),
        reversed: overrides.reversed.unwrap_or(reversed_default),
    };
    spec.validate()?;
    Ok(spec)
}

/// Wedge for gate 1, whose phase is half the enclosed solid angle.
pub fn gate1_wedge(phi1_target: f64, overrides: &WedgeOverrides) -> Result<WedgeLoopSpec> {
    solve_wedge(2.0 * phi1_target, phi1_target, overrides, false)
}

/// Wedge for gate 2, whose rotation angle equals the enclosed solid angle.
///
/// Traversed reversed by default: with the gate-2 map that orientation
/// produces `exp(+iφ₂σ_y)`.
pub fn gate2_wedge(phi2_target: f64, overrides: &WedgeOverrides) -> Result<WedgeLoopSpec> {
    solve_wedge(phi2_target, phi2_target, overrides, true)
}

/// Gate-1 schedule realizing `diag(1, e^{iφ₁})` on `{E⁻, E⁺}`.
pub fn gate1_schedule(phi1_target: f64, omega: f64, t_ad: f64, overrides: &WedgeOverrides) -> Result<LoopSchedule> {
    let spec = gate1_wedge(phi1_target, overrides)?;
    LoopSchedule::from_path(&wedge_path(&spec, t_ad)?, ControlMap::Gate1, omega, GateKind::Gate1)
}

/// Gate-2 schedule realizing `exp(iφ₂σ_y)` on `{E⁻, E⁺}`.
pub fn gate2_schedule(phi2_target: f64, omega: f64, t_ad: f64, overrides: &WedgeOverrides) -> Result<LoopSchedule> {
    let spec = gate2_wedge(phi2_target, overrides)?;
    LoopSchedule::from_path(&wedge_path(&spec, t_ad)?, ControlMap::Gate2, omega, GateKind::Gate2)
}

/// `T_ad·Ω̃²/δ`, the margin of the two-photon adiabaticity condition.
pub fn two_qubit_adiabaticity(omega_tilde: f64, shift: &BiexcitonShift, t_ad: f64) -> f64 {
    t_ad * omega_tilde * omega_tilde / shift.rad_per_fs()
}

/// Two-dot schedule: the gate-1 map restricted to `(Ω₊, Ω₀)` with radius
/// `Ω̃`.
pub fn two_qubit_schedule(
    spec: &WedgeLoopSpec,
    omega_tilde: f64,
    shift: &BiexcitonShift,
    t_ad: f64,
) -> Result<LoopSchedule> {
    let ratio = two_qubit_adiabaticity(omega_tilde, shift, t_ad);
    if !(ratio >= MIN_TWO_QUBIT_ADIABATICITY) {
        return Err(Error::Adiabaticity {
            ratio,
            minimum: MIN_TWO_QUBIT_ADIABATICITY,
        });
    }
    if ratio < WARN_TWO_QUBIT_ADIABATICITY {
        log::warn!("two-qubit schedule is marginally adiabatic: T_ad·Ω²/δ = {ratio:.1}");
    }
    LoopSchedule::from_path(&wedge_path(spec, t_ad)?, ControlMap::Gate1, omega_tilde, GateKind::TwoQubit)
}
