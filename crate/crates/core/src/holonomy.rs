//! Dark-space transport along a control loop.
//!
//! The connection is never formed symbolically. At every sample the dark
//! space is extracted numerically as the null space of `H`, and transport
//! between neighbouring samples is the unitary part of the frame overlap
//! matrix. The ordered product of these steps is the discrete Wilson line,
//! which converges quadratically to `P exp∮A` as the sampling is refined.

use std::f64::consts::SQRT_2;

use nalgebra::{DMatrix, Matrix2};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonians::{Model, DARK_EIGENVALUE_TOLERANCE};
use crate::loops::{LoopSchedule, Ramp, SphereAngles, WedgeLoopSpec};
use crate::output::complex_matrix;
use crate::quantum::{max_abs_diff, polar_unitary, smallest_singular_value, unitarity_defect, UnitaryOperator, C64};

/// Smallest singular value of a frame overlap accepted between neighbouring
/// samples. Anything lower means the frame jumped.
pub const MIN_FRAME_OVERLAP: f64 = 0.5;
/// Tolerance on the singular values of `D₀†D_N` for a closed loop.
pub const CLOSURE_TOLERANCE: f64 = 1e-6;

/// Gauge-aligned orthonormal basis (columns) of the dark space at one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DarkFrame {
    pub sample_index: usize,
    pub vectors: DMatrix<C64>,
}

impl DarkFrame {
    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    /// `⟨D_α(self)|D_β(other)⟩`.
    pub fn overlap(&self, other: &DarkFrame) -> DMatrix<C64> {
        self.vectors.adjoint() * &other.vectors
    }
}

/// Dark frames along `schedule`, each rotated within its dark space to be as
/// close as possible to its predecessor. The first frame is aligned to the
/// computational dark basis of `model`.
pub fn dark_frames(schedule: &LoopSchedule, model: &Model) -> Result<Vec<DarkFrame>> {
    let expected = model.system().dark_dim();
    let mut reference = model.computational_dark_basis();
    let mut frames = Vec::with_capacity(schedule.len());
    for (k, sample) in schedule.samples().iter().enumerate() {
        let h = model.build(&sample.cp)?;
        let raw = h.null_space(DARK_EIGENVALUE_TOLERANCE)?;
        if raw.ncols() != expected {
            return Err(Error::DegeneracyCrossing {
                sample: k,
                found: raw.ncols(),
                expected,
            });
        }
        let overlap = reference.adjoint() * &raw;
        let smallest = smallest_singular_value(&overlap);
        if smallest < MIN_FRAME_OVERLAP {
            if k == 0 {
                return Err(Error::InvalidLoop(
                    "loop must start where the dark space is the computational basis".into(),
                ));
            }
            return Err(Error::SamplingTooCoarse {
                sample: k,
                overlap: smallest,
            });
        }
        let aligned = raw * polar_unitary(&overlap)?.adjoint();
        reference = aligned.clone();
        frames.push(DarkFrame {
            sample_index: k,
            vectors: aligned,
        });
    }
    Ok(frames)
}

/// Dark-space holonomy of a closed loop.
#[derive(Debug, Clone, Serialize)]
pub struct HolonomyResult {
    /// In the basis of the first frame (the computational dark basis for
    /// frames from [`dark_frames`]).
    #[serde(rename = "unitary", serialize_with = "serialize_unitary")]
    pub unitary: UnitaryOperator,
    pub unitarity_defect: f64,
    pub step_count: usize,
    /// `max|U(n) − U(n/2)|`, the change when every other frame is dropped.
    pub cauchy_estimate: f64,
}

fn serialize_unitary<S: serde::Serializer>(u: &UnitaryOperator, s: S) -> std::result::Result<S::Ok, S::Error> {
    complex_matrix::serialize(u.matrix(), s)
}

fn transport(frames: &[&DarkFrame]) -> Result<DMatrix<C64>> {
    let first = frames[0];
    let last = frames[frames.len() - 1];
    let closure = first.overlap(last);
    let sv = closure.singular_values();
    if sv.iter().any(|s| (s - 1.0).abs() > CLOSURE_TOLERANCE) {
        return Err(Error::OpenPath(format!(
            "end dark space differs from start (singular values {:?})",
            sv.as_slice()
        )));
    }
    let d = first.dim();
    let mut acc = DMatrix::<C64>::identity(d, d);
    for pair in frames.windows(2) {
        let step = pair[1].overlap(pair[0]);
        acc = polar_unitary(&step)? * acc;
    }
    polar_unitary(&(closure * acc))
}

/// Discrete path-ordered product of unitarized frame overlaps, expressed in
/// the basis of the first frame.
pub fn wilson_line(frames: &[DarkFrame]) -> Result<HolonomyResult> {
    if frames.len() < 2 {
        return Err(Error::InvalidLoop("a Wilson line needs at least two frames".into()));
    }
    let all: Vec<&DarkFrame> = frames.iter().collect();
    let fine = transport(&all)?;

    let cauchy_estimate = if frames.len() >= 3 {
        let mut coarse: Vec<&DarkFrame> = frames.iter().step_by(2).collect();
        if !(frames.len() - 1).is_multiple_of(2) {
            coarse.push(&frames[frames.len() - 1]);
        }
        max_abs_diff(&fine, &transport(&coarse)?)
    } else {
        0.0
    };

    let defect = unitarity_defect(&fine);
    Ok(HolonomyResult {
        unitary: UnitaryOperator::new(fine)?,
        unitarity_defect: defect,
        step_count: frames.len() - 1,
        cauchy_estimate,
    })
}

/// Frames and Wilson line in one call.
pub fn holonomy(schedule: &LoopSchedule, model: &Model) -> Result<HolonomyResult> {
    wilson_line(&dark_frames(schedule, model)?)
}

const NORTH: [f64; 3] = [0.0, 0.0, 1.0];

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Oriented solid angle enclosed by a closed path on the unit sphere.
///
/// Sums the signed spherical excess of the geodesic triangles
/// `(north pole, p_k, p_{k+1})`; positive for counter-clockwise loops seen
/// from outside. The path must not pass through the south pole.
pub fn solid_angle(path: &[SphereAngles]) -> Result<f64> {
    if path.len() < 2 {
        return Ok(0.0);
    }
    let pts: Vec<[f64; 3]> = path.iter().map(SphereAngles::unit_vector).collect();
    let (a, b) = (pts[0], pts[pts.len() - 1]);
    let gap = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
    if gap > 1e-9 {
        return Err(Error::OpenPath(format!("path endpoints are {gap:e} apart")));
    }
    let mut total = 0.0;
    for w in pts.windows(2) {
        let (p, q) = (w[0], w[1]);
        let triple = p[0] * q[1] - p[1] * q[0];
        let denom = 1.0 + dot(NORTH, p) + dot(NORTH, q) + dot(p, q);
        total += 2.0 * triple.atan2(denom);
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictedKind {
    Gate1,
    Gate2,
}

/// Analytic single-qubit gates on `{E⁻, E⁺}`:
/// gate 1 is `exp(iφ|E⁺⟩⟨E⁺|)`, gate 2 is `exp(iφσ_y)`.
pub fn predicted_gate(kind: PredictedKind, phase: f64) -> UnitaryOperator {
    let m = match kind {
        PredictedKind::Gate1 => DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::from_polar(1.0, phase)],
        ),
        PredictedKind::Gate2 => {
            let (s, c) = phase.sin_cos();
            DMatrix::from_row_slice(
                2,
                2,
                &[C64::new(c, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0), C64::new(c, 0.0)],
            )
        }
    };
    UnitaryOperator::new(m).expect("analytic gate is unitary")
}

/// `arg(U₁₁ / U₀₀)`: the gate-1 phase of a diagonal 2×2 holonomy.
pub fn relative_phase(u: &UnitaryOperator) -> f64 {
    let m = u.matrix();
    (m[(1, 1)] * m[(0, 0)].conj()).arg()
}

/// `acos(Re tr U / 2)`: the rotation angle of an SU(2) holonomy.
pub fn rotation_angle(u: &UnitaryOperator) -> f64 {
    (u.matrix().trace().re / 2.0).clamp(-1.0, 1.0).acos()
}

/// Signed angle `α` of a real rotation `exp(iασ_y) = [[cos α, sin α], [−sin α, cos α]]`.
pub fn sigma_y_angle(u: &UnitaryOperator) -> f64 {
    let m = u.matrix();
    m[(0, 1)].re.atan2(m[(0, 0)].re)
}

/// Closed-form two-dot transport around a wedge, restricted to the dark pair
/// `{S, E⁺E⁺}` where `S = −(E⁰E⁺ + E⁺E⁰)/√2` is the symmetric partner of
/// `E⁺E⁺`.
///
/// With the gate-1 map the bright state is a product `|c⟩⊗|c⟩` of spin-½
/// coherent states, so the symmetric dark pair behaves as the `m = 0, −1`
/// states of a spin 1 whose `m = +1` state is bright. Each wedge leg is then
/// a constant generator projected on that pair; the antisymmetric dark
/// state is rotation invariant and not transported at all.
pub fn pair_transport(spec: &WedgeLoopSpec) -> Matrix2<C64> {
    let i = C64::new(0.0, 1.0);
    let r = 1.0 / SQRT_2;
    let jx = Matrix2::new(C64::new(0.0, 0.0), C64::new(r, 0.0), C64::new(r, 0.0), C64::new(0.0, 0.0));
    let jy = Matrix2::new(C64::new(0.0, 0.0), -i * r, i * r, C64::new(0.0, 0.0));
    let jz = Matrix2::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0));

    let (tm, sweep) = (spec.theta_max, spec.phi_sweep);
    let down = exp_i_hermitian(&(jy * C64::new(tm, 0.0)));
    let along = exp_i_hermitian(&((jz * C64::new(tm.cos(), 0.0) - jx * C64::new(tm.sin(), 0.0)) * C64::new(sweep, 0.0)));
    let up = down.adjoint();
    let frame = Matrix2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::from_polar(1.0, sweep));
    let w = frame * up * along * down;
    if spec.reversed {
        w.adjoint()
    } else {
        w
    }
}

/// [`pair_transport`] embedded in the computational dark basis
/// `{E⁰E⁺, E⁺E⁰, E⁺E⁺}`, acting as the identity on the antisymmetric state.
pub fn predicted_two_qubit(spec: &WedgeLoopSpec) -> UnitaryOperator {
    let p = pair_transport(spec);
    let r = 1.0 / SQRT_2;
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    // Columns S, E⁺E⁺, A with S = −(E⁰E⁺ + E⁺E⁰)/√2.
    let basis = DMatrix::from_row_slice(
        3,
        3,
        &[C64::new(-r, 0.0), z, C64::new(r, 0.0), C64::new(-r, 0.0), z, C64::new(-r, 0.0), z, one, z],
    );
    let block = DMatrix::from_row_slice(3, 3, &[p[(0, 0)], p[(0, 1)], z, p[(1, 0)], p[(1, 1)], z, z, z, one]);
    UnitaryOperator::new(&basis * block * basis.adjoint()).expect("closed-form transport is unitary")
}

/// `exp(iA)` for a 2×2 Hermitian `A = a₀I + a⃗·σ⃗`.
fn exp_i_hermitian(a: &Matrix2<C64>) -> Matrix2<C64> {
    let a0 = (a[(0, 0)].re + a[(1, 1)].re) / 2.0;
    let az = (a[(0, 0)].re - a[(1, 1)].re) / 2.0;
    let ax = a[(0, 1)].re;
    let ay = -a[(0, 1)].im;
    let n = (ax * ax + ay * ay + az * az).sqrt();
    let i = C64::new(0.0, 1.0);
    let (s, c) = n.sin_cos();
    let sinc = if n > 0.0 { s / n } else { 1.0 };
    let rot = Matrix2::new(
        C64::new(c, 0.0) + i * sinc * az,
        i * sinc * C64::new(ax, -ay),
        i * sinc * C64::new(ax, ay),
        C64::new(c, 0.0) - i * sinc * az,
    );
    rot * C64::from_polar(1.0, a0)
}

/// Wedge with the given `θ_max` whose two-dot holonomy maps `|E⁺E⁺⟩` to
/// itself times a phase (a pure controlled phase on that state).
///
/// Solves `⟨S|W|E⁺E⁺⟩ = 0` for the sweep in `(0, 2π]`. At `θ_max = π/2`
/// the root is `φ_sweep = π√2`.
pub fn controlled_phase_wedge(theta_max: f64, ramp: Ramp, n_samples: usize) -> Result<WedgeLoopSpec> {
    let leak = |sweep: f64| pair_transport(&WedgeLoopSpec::new(theta_max, sweep))[(0, 1)].norm();
    const GRID: usize = 4000;
    let tau = std::f64::consts::TAU;
    let grid: Vec<(f64, f64)> = (1..=GRID)
        .map(|k| {
            let x = tau * k as f64 / GRID as f64;
            (x, leak(x))
        })
        .collect();
    let mut best: Option<(f64, f64)> = None;
    for w in grid.windows(3) {
        if w[1].1 <= w[0].1 && w[1].1 <= w[2].1 {
            let (x, v) = golden_min(&leak, w[0].0, w[2].0);
            if v < 1e-9 && best.is_none() {
                best = Some((x, v));
            }
        }
    }
    let (sweep, _) = best.ok_or_else(|| {
        Error::InvalidLoop(format!("no sweep at theta_max = {theta_max} returns |E+E+> to itself"))
    })?;
    let spec = WedgeLoopSpec {
        theta_max,
        phi_sweep: sweep.min(tau),
        ramp,
        n_samples,
        reversed: false,
    };
    spec.validate()?;
    Ok(spec)
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-15 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / 2.0;
    (x, f(x))
}
