use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {lhs:?} vs {rhs:?}")]
    DimensionMismatch {
        op: &'static str,
        lhs: (usize, usize),
        rhs: (usize, usize),
    },

    #[error("no nullspace: matrix has full rank")]
    NoNullspace,

    #[error("nullspace not unique: matrix is zero")]
    NullspaceNotUnique,

    #[error("expected a 2x2 matrix, got {0}x{1}")]
    NotTwoByTwo(usize, usize),

    /// `(-Δε + iΔΓ)² + 4ν₀² = 0`: the two GMM levels coalesce.
    #[error("GMM exceptional point: pseudo-fermion representation does not exist (|discriminant| = {discriminant:e})")]
    GmmExceptionalPoint { discriminant: f64 },

    #[error("GMM coupling nu0 must be nonzero")]
    ZeroGmmCoupling,

    #[error("free gauge parameter beta12 must be nonzero")]
    ZeroGauge,

    #[error("boson-fermion coupling must be nonzero for sector analysis")]
    ZeroCoupling,

    #[error("ground sector has a single level (n must be >= 1)")]
    GroundSector,

    #[error("cutoff exceeded: need Fock level {needed}, cutoff is {cutoff}")]
    CutoffExceeded { needed: usize, cutoff: usize },

    #[error("Fock cutoff must be at least 2, got {0}")]
    CutoffTooSmall(usize),

    #[error("inconsistent parameters: {0}")]
    InconsistentParameters(String),

    #[error("fermionic vacua self-orthogonal (GMM EP)")]
    SelfOrthogonalVacua,

    #[error("loop passes through EP; change radius or steps (theta = {theta})")]
    LoopThroughEp { theta: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
