//! Labeled finite-dimensional Hilbert-space primitives.
//!
//! Dimensions here are tiny (4 and 5), so everything is dense.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;

/// Tolerance on `|‖ψ‖² − 1|` accepted when a state is constructed.
pub const NORM_TOLERANCE: f64 = 1e-8;
/// Relative Hermiticity tolerance, `max|H − H†| ≤ tol · max|H|`.
pub const HERMITICITY_TOLERANCE: f64 = 1e-12;
/// Unitarity tolerance, `max|U†U − I| ≤ tol`.
pub const UNITARITY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum System {
    /// One dot: `G, E⁻, E⁺, E⁰`.
    SingleExciton,
    /// Two coupled dots restricted to the `{0,+}` polarizations:
    /// `GG, E⁰E⁰, E⁰E⁺, E⁺E⁰, E⁺E⁺`.
    TwoExciton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    G,
    Eminus,
    Eplus,
    E0,
    GG,
    E0E0,
    E0Eplus,
    EplusE0,
    EplusEplus,
}

const SINGLE_LEVELS: [Level; 4] = [Level::G, Level::Eminus, Level::Eplus, Level::E0];
const TWO_LEVELS: [Level; 5] = [
    Level::GG,
    Level::E0E0,
    Level::E0Eplus,
    Level::EplusE0,
    Level::EplusEplus,
];

impl System {
    pub fn dim(self) -> usize {
        self.levels().len()
    }

    /// Basis in its fixed order. Every trace and matrix uses this order.
    pub fn levels(self) -> &'static [Level] {
        match self {
            System::SingleExciton => &SINGLE_LEVELS,
            System::TwoExciton => &TWO_LEVELS,
        }
    }

    pub fn ground(self) -> Level {
        match self {
            System::SingleExciton => Level::G,
            System::TwoExciton => Level::GG,
        }
    }

    /// Dimension of the zero-eigenvalue space for any nonzero drive.
    pub fn dark_dim(self) -> usize {
        self.dim() - 2
    }
}

impl Level {
    pub fn system(self) -> System {
        match self {
            Level::G | Level::Eminus | Level::Eplus | Level::E0 => System::SingleExciton,
            _ => System::TwoExciton,
        }
    }

    pub fn index(self) -> usize {
        self.system()
            .levels()
            .iter()
            .position(|&l| l == self)
            .expect("level belongs to its own system")
    }

    pub fn name(self) -> &'static str {
        match self {
            Level::G => "G",
            Level::Eminus => "Eminus",
            Level::Eplus => "Eplus",
            Level::E0 => "E0",
            Level::GG => "GG",
            Level::E0E0 => "E0E0",
            Level::E0Eplus => "E0Eplus",
            Level::EplusE0 => "EplusE0",
            Level::EplusEplus => "EplusEplus",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SINGLE_LEVELS
            .iter()
            .chain(TWO_LEVELS.iter())
            .copied()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::InvalidState(format!("unknown basis label `{s}`")))
    }
}

/// A normalized state over one of the two fixed bases.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    system: System,
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn basis(level: Level) -> Self {
        let system = level.system();
        let mut amplitudes = DVector::zeros(system.dim());
        amplitudes[level.index()] = C64::new(1.0, 0.0);
        Self { system, amplitudes }
    }

    /// Wraps amplitudes that must already be normalized.
    pub fn from_amplitudes(system: System, amplitudes: Vec<C64>) -> Result<Self> {
        let state = Self::from_vector_unchecked(system, DVector::from_vec(amplitudes))?;
        let defect = (state.norm_sqr() - 1.0).abs();
        if defect > NORM_TOLERANCE {
            return Err(Error::NotNormalized { defect });
        }
        Ok(state)
    }

    pub fn normalized(system: System, amplitudes: Vec<C64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite amplitude vector".into()));
        }
        Self::from_vector_unchecked(system, v.unscale(norm))
    }

    /// Wraps a vector without checking its norm. Used for integration output,
    /// where norm drift is reported rather than corrected.
    pub(crate) fn from_vector_unchecked(system: System, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != system.dim() {
            return Err(Error::DimensionMismatch {
                expected: system.dim(),
                got: amplitudes.len(),
            });
        }
        Ok(Self { system, amplitudes })
    }

    pub fn system(&self) -> System {
        self.system
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, level: Level) -> C64 {
        debug_assert_eq!(level.system(), self.system);
        self.amplitudes[level.index()]
    }

    pub fn population(&self, level: Level) -> f64 {
        self.amplitude(level).norm_sqr()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.system != other.system {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }
}

/// `max |m_ij|`.
pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |a_ij − b_ij|`.
pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    max_abs(&(a - b))
}

/// `max |M†M − I|`.
pub fn unitarity_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.ncols();
    max_abs(&(m.adjoint() * m - DMatrix::<C64>::identity(n, n)))
}

/// Unitary factor `W` of the polar decomposition `M = W·P`, `P ≥ 0`.
pub fn polar_unitary(m: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let svd = m.clone().svd(true, true);
    match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => Ok(u * v_t),
        _ => Err(Error::Numerical("SVD did not produce singular vectors".into())),
    }
}

pub fn smallest_singular_value(m: &DMatrix<C64>) -> f64 {
    m.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: DMatrix<C64>,
}

/// Eigenvalues in ascending order with matching orthonormal eigenvector
/// columns.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl HermitianOperator {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        let defect = max_abs_diff(&matrix, &matrix.adjoint());
        if defect > HERMITICITY_TOLERANCE * max_abs(&matrix) {
            return Err(Error::NonHermitian { defect });
        }
        Ok(Self { matrix })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    /// Built from the strict lower triangle; the upper triangle is filled
    /// with conjugates so the result is Hermitian exactly.
    pub(crate) fn from_lower(dim: usize, entries: impl IntoIterator<Item = ((usize, usize), C64)>) -> Self {
        let mut matrix = DMatrix::zeros(dim, dim);
        for ((i, j), z) in entries {
            debug_assert!(i > j);
            matrix[(i, j)] = z;
            matrix[(j, i)] = z.conj();
        }
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.matrix)
    }

    pub fn apply(&self, state: &StateVector) -> Result<DVector<C64>> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: state.dim(),
            });
        }
        Ok(&self.matrix * state.amplitudes())
    }

    pub fn eigensystem(&self) -> Result<Eigensystem> {
        let eig = SymmetricEigen::try_new(self.matrix.clone(), f64::EPSILON, 0)
            .ok_or_else(|| Error::Numerical("Hermitian eigensolver did not converge".into()))?;
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_columns(
            &order
                .iter()
                .map(|&k| eig.eigenvectors.column(k).into_owned())
                .collect::<Vec<_>>(),
        );
        Ok(Eigensystem { values, vectors })
    }

    /// Orthonormal basis (as columns) of the eigenvectors whose eigenvalue is
    /// below `rel_tol · max|λ|`. The zero operator returns the full space.
    pub fn null_space(&self, rel_tol: f64) -> Result<DMatrix<C64>> {
        let eig = self.eigensystem()?;
        let scale = eig.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let cols: Vec<_> = eig
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() <= rel_tol * scale)
            .map(|(k, _)| eig.vectors.column(k).into_owned())
            .collect();
        if cols.is_empty() {
            return Ok(DMatrix::zeros(self.dim(), 0));
        }
        Ok(DMatrix::from_columns(&cols))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: DMatrix<C64>,
}

impl UnitaryOperator {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        let defect = unitarity_defect(&matrix);
        if !(defect <= UNITARITY_TOLERANCE) {
            return Err(Error::NonUnitary { defect });
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.matrix)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn compose(&self, rhs: &UnitaryOperator) -> Self {
        Self {
            matrix: &self.matrix * &rhs.matrix,
        }
    }

    pub fn distance(&self, other: &UnitaryOperator) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }

    /// `min_χ max|U − e^{iχ}V|`, using the phase `χ = arg tr(V†U)`.
    pub fn distance_up_to_phase(&self, other: &UnitaryOperator) -> f64 {
        distance_up_to_phase(&self.matrix, &other.matrix)
    }
}

pub(crate) fn distance_up_to_phase(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    let overlap = (b.adjoint() * a).trace();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    max_abs_diff(a, &b.map(|z| z * phase))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn inner_product_examples() {
        let ep = StateVector::basis(Level::Eplus);
        let em = StateVector::basis(Level::Eminus);
        let e0 = StateVector::basis(Level::E0);
        assert_eq!(ep.inner(&ep).unwrap(), c(1.0, 0.0));
        assert_eq!(ep.inner(&em).unwrap(), c(0.0, 0.0));

        let psi = StateVector::from_amplitudes(
            System::SingleExciton,
            vec![c(0.0, 0.0), c(0.0, 0.0), c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)],
        )
        .unwrap();
        let z = psi.inner(&e0).unwrap();
        assert!((z - c(0.0, -FRAC_1_SQRT_2)).norm() < 1e-15);
    }

    #[test]
    fn inner_product_rejects_mixed_systems() {
        let a = StateVector::basis(Level::Eplus);
        let b = StateVector::basis(Level::EplusEplus);
        assert!(matches!(a.inner(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn unnormalized_state_rejected() {
        let r = StateVector::from_amplitudes(System::SingleExciton, vec![c(1.0, 0.0); 4]);
        assert!(matches!(r, Err(Error::NotNormalized { .. })));
        let r = StateVector::from_amplitudes(System::SingleExciton, vec![c(1.0, 0.0); 3]);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn labels_round_trip() {
        for sys in [System::SingleExciton, System::TwoExciton] {
            for (k, l) in sys.levels().iter().enumerate() {
                assert_eq!(l.index(), k);
                assert_eq!(l.name().parse::<Level>().unwrap(), *l);
            }
        }
        assert!("Ex".parse::<Level>().is_err());
    }

    #[test]
    fn eigensystem_trivial_cases() {
        let zero = HermitianOperator::zeros(4).eigensystem().unwrap();
        assert_eq!(zero.values, vec![0.0; 4]);

        let diag = DMatrix::from_diagonal(&DVector::from_vec(vec![
            c(3.0, 0.0),
            c(1.0, 0.0),
            c(4.0, 0.0),
            c(2.0, 0.0),
        ]));
        let eig = HermitianOperator::new(diag).unwrap().eigensystem().unwrap();
        for (v, want) in eig.values.iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert!((v - want).abs() < 1e-14);
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = DMatrix::<C64>::zeros(2, 2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(HermitianOperator::new(m), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn polar_of_unitary_is_itself() {
        let s = FRAC_1_SQRT_2;
        let u = DMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(0.0, s), c(0.0, s), c(s, 0.0)]);
        let w = polar_unitary(&u).unwrap();
        assert!(max_abs_diff(&u, &w) < 1e-14);
        let scaled = u.map(|z| z * 0.3);
        assert!(max_abs_diff(&polar_unitary(&scaled).unwrap(), &u) < 1e-14);
    }

    #[test]
    fn distance_up_to_phase_removes_global_phase() {
        let u = DMatrix::<C64>::identity(3, 3);
        let v = u.map(|z| z * C64::from_polar(1.0, 0.7));
        assert!(distance_up_to_phase(&u, &v) < 1e-15);
    }

    fn hermitian(n: usize) -> impl Strategy<Value = DMatrix<C64>> {
        prop::collection::vec(-1.0f64..1.0, 2 * n * n).prop_map(move |xs| {
            let a = DMatrix::from_fn(n, n, |i, j| c(xs[2 * (i * n + j)], xs[2 * (i * n + j) + 1]));
            (&a + a.adjoint()).map(|z| z * 0.5)
        })
    }

    fn reconstruction_error(h: &DMatrix<C64>) -> f64 {
        let op = HermitianOperator::new(h.clone()).unwrap();
        let eig = op.eigensystem().unwrap();
        let n = op.dim();
        let mut sum = DMatrix::<C64>::zeros(n, n);
        for (k, &lam) in eig.values.iter().enumerate() {
            let v = eig.vectors.column(k);
            sum += (v * v.adjoint()).map(|z| z * lam);
        }
        for k in 1..n {
            assert!(eig.values[k - 1] <= eig.values[k]);
        }
        assert!(unitarity_defect(&eig.vectors) < 1e-10);
        max_abs_diff(&sum, h) / op.max_abs().max(f64::MIN_POSITIVE)
    }

    proptest! {
        #[test]
        fn eigen_reconstruction_4(h in hermitian(4)) {
            prop_assert!(reconstruction_error(&h) <= 1e-9);
        }

        #[test]
        fn eigen_reconstruction_5(h in hermitian(5)) {
            prop_assert!(reconstruction_error(&h) <= 1e-9);
        }

        #[test]
        fn self_inner_is_norm(xs in prop::collection::vec(-1.0f64..1.0, 10)) {
            let amps: Vec<C64> = xs.chunks(2).map(|p| c(p[0], p[1])).collect();
            prop_assume!(amps.iter().any(|z| z.norm() > 1e-3));
            let psi = StateVector::normalized(System::TwoExciton, amps).unwrap();
            let z = psi.inner(&psi).unwrap();
            prop_assert!(z.im.abs() <= 1e-12);
            prop_assert!(z.re >= 0.0);
            prop_assert!((z.re - psi.norm_sqr()).abs() <= 1e-12);
        }

        #[test]
        fn cauchy_schwarz(xs in prop::collection::vec(-1.0f64..1.0, 16)) {
            let a: Vec<C64> = xs[..8].chunks(2).map(|p| c(p[0], p[1])).collect();
            let b: Vec<C64> = xs[8..].chunks(2).map(|p| c(p[0], p[1])).collect();
            prop_assume!(a.iter().any(|z| z.norm() > 1e-3) && b.iter().any(|z| z.norm() > 1e-3));
            let a = StateVector::normalized(System::SingleExciton, a).unwrap();
            let b = StateVector::normalized(System::SingleExciton, b).unwrap();
            prop_assert!(a.inner(&b).unwrap().norm() <= 1.0 + 1e-12);
        }
    }
}
