use thiserror::Error;

/// Failures reported by the toolkit.
///
/// Scalar payloads are widened to `f64` so the error type does not depend
/// on the scalar parameter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval: left {left} must be strictly less than right {right}")]
    InvalidInterval { left: f64, right: f64 },

    #[error("potential is not finite at x = {at}")]
    UnboundedPotential { at: f64 },

    #[error("constraint functions are linearly dependent on the working grid (rank {rank} of {count})")]
    DependentConstraints { rank: usize, count: usize },

    #[error("rank-deficient plane")]
    RankDeficientPlane,

    #[error("plane is not isotropic: relative symplectic defect {defect:e}")]
    NotIsotropic { defect: f64 },

    #[error("blow-up: non-finite state at x = {at}")]
    BlowUp { at: f64 },

    #[error("constraint degeneracy: constraint map has rank {rank} < {expected}")]
    ConstraintDegeneracy { rank: usize, expected: usize },

    #[error("non-generic solution space of dimension {dim}")]
    NonGenericSolutionSpace { dim: usize },

    #[error("zero kernel vector")]
    ZeroKernelVector,

    #[error("shift at eigenvalue: pivot breakdown persists after perturbation")]
    ShiftAtEigenvalue,

    #[error("matrix is not symmetric (defect {defect:e})")]
    NotSymmetric { defect: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("increase grid_points: two roots within one cell near {near}")]
    IncreaseGrid { near: f64 },

    #[error("spurious determinant root at {at}: no intersection confirmed")]
    SpuriousRoot { at: f64 },

    #[error("crossing at lambda_infinity = {at}")]
    CrossingAtLambdaInfinity { at: f64 },

    #[error("resolvent pole near lambda = {lambda}")]
    ResolventPole { lambda: f64 },

    #[error("no stabilization of n(M(lambda)); trail: {trail:?}")]
    NoStabilization { trail: Vec<(f64, usize)> },

    #[error("quadrature needs an odd number (>= 3) of uniform samples, got {0}")]
    QuadraturePoints(usize),

    #[error("root-count guard: sqrt(C) = {sqrt_c} lies within 1e-9 of a root; try C = {suggested}")]
    RootGuard { sqrt_c: f64, suggested: f64 },

    #[error("no decaying state: omega = {omega} must be negative")]
    NoDecayingState { omega: f64 },

    #[error("singularity window: |t| = {t} <= {delta}")]
    SingularityWindow { t: f64, delta: f64 },

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
