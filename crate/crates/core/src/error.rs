use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operator is not Hermitian (max |H - H†| = {defect:e})")]
    NonHermitian { defect: f64 },

    #[error("operator is not unitary (max |U†U - I| = {defect:e})")]
    NonUnitary { defect: f64 },

    #[error("state is not normalized (|norm² - 1| = {defect:e})")]
    NotNormalized { defect: f64 },

    #[error("invalid control point: {0}")]
    InvalidControlPoint(String),

    #[error("two-photon model defined for {{0,+}} polarizations only")]
    TwoPhotonPolarization,

    #[error("biexciton shift must be positive, got {0}")]
    InvalidShift(f64),

    #[error("zero-area loop")]
    ZeroAreaLoop,

    #[error("invalid loop: {0}")]
    InvalidLoop(String),

    #[error("unreachable phase target {target} (needs solid angle {solid_angle} > 4π)")]
    UnreachableTarget { target: f64, solid_angle: f64 },

    #[error("violates T_ad ≫ δ/|Ω|²: T_ad·Ω²/δ = {ratio:.3} < {minimum}")]
    Adiabaticity { ratio: f64, minimum: f64 },

    #[error("degeneracy crossing at sample {sample}: dark dimension {found}, expected {expected}")]
    DegeneracyCrossing {
        sample: usize,
        found: usize,
        expected: usize,
    },

    #[error("sampling too coarse at sample {sample}: smallest frame overlap {overlap:.3e}")]
    SamplingTooCoarse { sample: usize, overlap: f64 },

    #[error("path is not closed: {0}")]
    OpenPath(String),

    #[error("step size too large: norm drift {drift:e}")]
    StepSizeTooLarge { drift: f64 },

    #[error("invalid time step {dt} fs (must be positive and at most {limit} fs)")]
    InvalidTimeStep { dt: f64, limit: f64 },

    #[error("invalid initial state: {0}")]
    InvalidState(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for errors caused by inputs that violate an operation's
    /// precondition, as opposed to failures inside a computation.
    pub fn is_precondition(&self) -> bool {
        !matches!(self, Error::Numerical(_))
    }
}
