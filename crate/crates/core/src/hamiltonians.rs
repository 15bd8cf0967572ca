//! Interaction Hamiltonians for one driven dot and for the effective
//! two-photon process on two dipole-coupled dots.
//!
//! Both are written in the resonant rotating frame: the retained levels carry
//! no diagonal energy, so dark states have exactly zero eigenvalue.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{HermitianOperator, Level, System, C64};
use crate::units;

/// Default upper bound on any single Rabi amplitude, rad/fs. Values above it
/// almost always mean a unit mix-up (meV or fs⁻¹ passed as rad/fs).
pub const DEFAULT_MAX_RABI: f64 = 1.0;

/// Relative threshold used to count zero eigenvalues.
pub const DARK_EIGENVALUE_TOLERANCE: f64 = 1e-9;

/// Complex Rabi frequencies `(Ω₋, Ω₊, Ω₀)` in rad/fs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlPoint {
    pub omega_minus: C64,
    pub omega_plus: C64,
    pub omega_zero: C64,
}

impl ControlPoint {
    pub fn new(omega_minus: C64, omega_plus: C64, omega_zero: C64) -> Result<Self> {
        Self::with_limit(omega_minus, omega_plus, omega_zero, DEFAULT_MAX_RABI)
    }

    pub fn with_limit(omega_minus: C64, omega_plus: C64, omega_zero: C64, max_rabi: f64) -> Result<Self> {
        let cp = Self {
            omega_minus,
            omega_plus,
            omega_zero,
        };
        for (name, z) in cp.named() {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::InvalidControlPoint(format!("{name} is not finite")));
            }
            if z.norm() > max_rabi {
                return Err(Error::InvalidControlPoint(format!(
                    "|{name}| = {} rad/fs exceeds {max_rabi} rad/fs",
                    z.norm()
                )));
            }
        }
        Ok(cp)
    }

    pub fn real(omega_minus: f64, omega_plus: f64, omega_zero: f64) -> Result<Self> {
        Self::new(
            C64::new(omega_minus, 0.0),
            C64::new(omega_plus, 0.0),
            C64::new(omega_zero, 0.0),
        )
    }

    pub fn zero() -> Self {
        Self {
            omega_minus: C64::new(0.0, 0.0),
            omega_plus: C64::new(0.0, 0.0),
            omega_zero: C64::new(0.0, 0.0),
        }
    }

    fn named(&self) -> [(&'static str, C64); 3] {
        [
            ("omega_minus", self.omega_minus),
            ("omega_plus", self.omega_plus),
            ("omega_zero", self.omega_zero),
        ]
    }

    /// `|Ω⃗| = (Σ|Ω_μ|²)^{1/2}`.
    pub fn magnitude(&self) -> f64 {
        (self.omega_minus.norm_sqr() + self.omega_plus.norm_sqr() + self.omega_zero.norm_sqr()).sqrt()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            omega_minus: self.omega_minus * c,
            omega_plus: self.omega_plus * c,
            omega_zero: self.omega_zero * c,
        }
    }

    pub fn max_diff(&self, other: &ControlPoint) -> f64 {
        [
            (self.omega_minus - other.omega_minus).norm(),
            (self.omega_plus - other.omega_plus).norm(),
            (self.omega_zero - other.omega_zero).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Exciton–exciton energy shift `δ`, stored in rad/fs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiexcitonShift {
    delta: f64,
}

impl BiexcitonShift {
    pub fn new(delta_rad_per_fs: f64) -> Result<Self> {
        if !(delta_rad_per_fs > 0.0) || !delta_rad_per_fs.is_finite() {
            return Err(Error::InvalidShift(delta_rad_per_fs));
        }
        Ok(Self {
            delta: delta_rad_per_fs,
        })
    }

    pub fn from_mev(delta_mev: f64) -> Result<Self> {
        Self::new(units::mev_to_rad_per_fs(delta_mev))
    }

    pub fn rad_per_fs(&self) -> f64 {
        self.delta
    }

    pub fn mev(&self) -> f64 {
        units::rad_per_fs_to_mev(self.delta)
    }
}

/// `H = −Σ_μ (Ω_μ |E^μ⟩⟨G| + h.c.)` on `G, E⁻, E⁺, E⁰`.
pub fn build_single(cp: &ControlPoint) -> HermitianOperator {
    let g = Level::G.index();
    HermitianOperator::from_lower(
        4,
        [
            ((Level::Eminus.index(), g), -cp.omega_minus),
            ((Level::Eplus.index(), g), -cp.omega_plus),
            ((Level::E0.index(), g), -cp.omega_zero),
        ],
    )
}

/// Effective two-photon Hamiltonian
/// `H = −(2/δ) Σ_{α,β∈{0,+}} (Ω_α Ω_β |E^α E^β⟩⟨GG| + h.c.)`.
///
/// The product `Ω_α Ω_β` is taken without conjugation.
pub fn build_two_exciton(cp: &ControlPoint, shift: &BiexcitonShift) -> Result<HermitianOperator> {
    if cp.omega_minus.norm() != 0.0 {
        return Err(Error::TwoPhotonPolarization);
    }
    let pref = -2.0 / shift.rad_per_fs();
    let (o0, op) = (cp.omega_zero, cp.omega_plus);
    let gg = Level::GG.index();
    Ok(HermitianOperator::from_lower(
        5,
        [
            ((Level::E0E0.index(), gg), o0 * o0 * pref),
            ((Level::E0Eplus.index(), gg), o0 * op * pref),
            ((Level::EplusE0.index(), gg), op * o0 * pref),
            ((Level::EplusEplus.index(), gg), op * op * pref),
        ],
    ))
}

/// Which Hamiltonian a simulation uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Model {
    Single,
    TwoExciton(BiexcitonShift),
}

impl Model {
    pub fn system(&self) -> System {
        match self {
            Model::Single => System::SingleExciton,
            Model::TwoExciton(_) => System::TwoExciton,
        }
    }

    pub fn build(&self, cp: &ControlPoint) -> Result<HermitianOperator> {
        match self {
            Model::Single => Ok(build_single(cp)),
            Model::TwoExciton(shift) => build_two_exciton(cp, shift),
        }
    }

    /// The normalized state coupled to the ground level, `None` without drive.
    ///
    /// Both Hamiltonians have the form `|b⟩⟨ground| + h.c.`, so the bright
    /// vector is the ground column of `H`.
    pub fn bright_state(&self, h: &HermitianOperator) -> Option<DVector<C64>> {
        let ground = self.system().ground().index();
        let col = h.matrix().column(ground).into_owned();
        let norm = col.norm();
        (norm > 0.0).then(|| col.unscale(norm))
    }

    /// Dark basis at the loop start, where only `Ω₀` is on.
    pub fn computational_dark_basis(&self) -> DMatrix<C64> {
        let levels: &[Level] = match self {
            Model::Single => &[Level::Eminus, Level::Eplus],
            Model::TwoExciton(_) => &[Level::E0Eplus, Level::EplusE0, Level::EplusEplus],
        };
        let dim = self.system().dim();
        let mut basis = DMatrix::zeros(dim, levels.len());
        for (k, l) in levels.iter().enumerate() {
            basis[(l.index(), k)] = C64::new(1.0, 0.0);
        }
        basis
    }

    pub fn computational_levels(&self) -> &'static [Level] {
        match self {
            Model::Single => &[Level::Eminus, Level::Eplus],
            Model::TwoExciton(_) => &[Level::E0Eplus, Level::EplusE0, Level::EplusEplus],
        }
    }
}

/// Number of eigenvalues with `|λ| < tol · max|λ|`.
pub fn dark_dimension(h: &HermitianOperator) -> Result<usize> {
    Ok(h.null_space(DARK_EIGENVALUE_TOLERANCE)?.ncols())
}
