//! Morse indices of constrained Schrödinger operators `−u″ + Vu` on an
//! interval, restricted to the orthogonal complement of finitely many
//! functions `φ₁…φ_m`.
//!
//! Four routes compute the same integer:
//!
//! * [`discrete`]: inertia of a finite-difference matrix compressed onto
//!   the constraint complement.
//! * [`constraint_matrix`]: the unconstrained index minus the negative
//!   count of `⟨(𝓛 − λ)⁻¹φᵢ, φⱼ⟩` as λ → 0⁻.
//! * [`maslov`]: crossings of the constrained Cauchy-data plane with the
//!   boundary plane as λ sweeps up to 0.
//! * [`conjugate`]: constrained conjugate points over a family of
//!   subintervals growing to the full interval.
//!
//! [`nls`] applies the conjugate-point picture to power-law solitons and
//! [`oracle`] holds closed-form and brute-force references.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix `f64`.

pub mod conjugate;
pub mod constraint_matrix;
pub mod discrete;
pub mod error;
pub mod linalg;
pub mod maslov;
pub mod model;
pub mod morse;
pub mod nls;
pub mod oracle;
pub mod scalar;
pub(crate) mod scan;
pub mod shooting;

pub use error::{Error, Result};
pub use model::{BoundaryCondition, BoundaryTrace, CrossingKind};
pub use morse::{morse_report, Numerics, Route};
pub use scalar::Real;

pub type Interval = model::Interval<f64>;
pub type Potential = model::Potential<f64>;
pub type ConstraintFunction = model::ConstraintFunction<f64>;
pub type SchroedingerProblem = model::SchroedingerProblem<f64>;
pub type LagrangianPlane = model::LagrangianPlane<f64>;
pub type CrossingRecord = model::CrossingRecord<f64>;
pub type Matrix = linalg::Matrix<f64>;
pub type ConstrainedSolutionBasis = shooting::ConstrainedSolutionBasis<f64>;
pub type DiscreteForm = discrete::DiscreteForm<f64>;
pub type LambdaSweepReport = maslov::LambdaSweepReport<f64>;
pub type ConstraintMatrixSample = constraint_matrix::ConstraintMatrixSample<f64>;
pub type IndexLimitReport = constraint_matrix::IndexLimitReport<f64>;
pub type DomainFamily = conjugate::DomainFamily<f64>;
pub type ConjugateReport = conjugate::ConjugateReport<f64>;
pub type SolitonProfile = nls::SolitonProfile<f64>;
pub type MorseReport = morse::MorseReport<f64>;
