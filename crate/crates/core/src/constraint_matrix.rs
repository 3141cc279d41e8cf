//! The constraint-matrix route: `M(λ)ᵢⱼ = ⟨(𝓛 − λ)⁻¹φᵢ, φⱼ⟩` and its
//! negative count as λ → 0⁻.
//!
//! Resolvents are computed by shooting so this route shares nothing with
//! the discrete one it is compared against.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};
use crate::maslov::lambda_infinity;
use crate::model::{BoundaryCondition, ConstraintFunction, SchroedingerProblem};
use crate::oracle::quadrature;
use crate::scalar::Real;
use crate::shooting::{integrate_forced, steps_for, ExtendedState, Trajectory, DEFAULT_STEPS_PER_UNIT};

/// Relative size of the homogeneous boundary value below which λ is
/// treated as an eigenvalue of 𝓛.
pub const POLE_TOL: f64 = 1e-8;

/// A function sampled on the uniform shooting grid.
#[derive(Debug, Clone)]
pub struct SampledFunction<T> {
    pub positions: Vec<T>,
    pub values: Vec<T>,
    pub derivatives: Vec<T>,
    pub step: T,
}

#[derive(Debug, Clone)]
pub struct ConstraintMatrixSample<T> {
    pub lambda: T,
    pub matrix: Matrix<T>,
    pub negative_count: usize,
    /// Ascending.
    pub eigenvalues: Vec<T>,
    /// Relative asymmetry before symmetrisation.
    pub symmetry_defect: T,
}

#[derive(Debug, Clone)]
pub struct IndexLimitReport<T> {
    pub limit: usize,
    /// Usable samples in sequence order.
    pub samples: Vec<ConstraintMatrixSample<T>>,
    /// Sequence entries skipped as resolvent poles.
    pub poles: Vec<T>,
}

fn shoot<T: Real>(
    problem: &SchroedingerProblem<T>,
    rhs: &ConstraintFunction<T>,
    lambda: T,
    init: (T, T),
    forced: bool,
    steps: usize,
) -> Result<Trajectory<T>> {
    let a = if forced { T::one() } else { T::zero() };
    let state = ExtendedState::new(init.0, init.1, vec![a]);
    let (_, traj) = integrate_forced(
        problem.potential(),
        std::slice::from_ref(rhs),
        lambda,
        &problem.interval(),
        &state,
        steps,
        true,
    )?;
    Ok(traj.expect("recording requested"))
}

/// Solves `(L − λ)u = rhs` with the problem's boundary condition by
/// variation of parameters.
pub fn resolvent_apply<T: Real>(
    problem: &SchroedingerProblem<T>,
    lambda: T,
    rhs: &ConstraintFunction<T>,
    steps: usize,
) -> Result<SampledFunction<T>> {
    let (z, o) = (T::zero(), T::one());
    let part = shoot(problem, rhs, lambda, (z, z), true, steps)?;
    let (hom, boundary, part_boundary) = match problem.bc() {
        BoundaryCondition::Dirichlet => {
            let y = shoot(problem, rhs, lambda, (z, o), false, steps)?;
            let b = *y.u.last().unwrap();
            let scale = y.u.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
            (y, (b, scale), *part.u.last().unwrap())
        }
        BoundaryCondition::Neumann => {
            let y = shoot(problem, rhs, lambda, (o, z), false, steps)?;
            let b = *y.uprime.last().unwrap();
            let scale = y.uprime.iter().fold(T::zero(), |m, &v| m.max(v.abs())).max(T::one());
            (y, (b, scale), *part.uprime.last().unwrap())
        }
    };
    if boundary.0.abs() <= T::lit(POLE_TOL) * boundary.1 {
        return Err(Error::ResolventPole { lambda: lambda.to_f64_lossy() });
    }
    let alpha = -part_boundary / boundary.0;
    Ok(SampledFunction {
        values: part.u.iter().zip(&hom.u).map(|(&p, &y)| p + alpha * y).collect(),
        derivatives: part.uprime.iter().zip(&hom.uprime).map(|(&p, &y)| p + alpha * y).collect(),
        positions: part.positions,
        step: part.step,
    })
}

/// `M(λ)` with symmetrisation and its spectrum.
pub fn constraint_matrix<T: Real>(
    problem: &SchroedingerProblem<T>,
    lambda: T,
    steps: usize,
) -> Result<ConstraintMatrixSample<T>> {
    let cons = problem.constraints();
    let m = cons.len();
    let mut matrix = Matrix::zeros(m, m);
    for (i, ci) in cons.iter().enumerate() {
        let u = resolvent_apply(problem, lambda, ci, steps)?;
        for (j, cj) in cons.iter().enumerate() {
            let prod: Vec<T> = u.positions.iter().zip(&u.values).map(|(&x, &v)| v * cj.value(x)).collect();
            matrix[(i, j)] = quadrature(&prod, u.step)?;
        }
    }
    let symmetry_defect = if m == 0 { T::zero() } else { matrix.symmetrize() / matrix.max_abs().max(T::min_positive_value()) };
    let (eigenvalues, _) = symmetric_eigen(&matrix)?;
    let negative_count = eigenvalues.iter().filter(|&&v| v < T::zero()).count();
    Ok(ConstraintMatrixSample { lambda, matrix, negative_count, eigenvalues, symmetry_defect })
}

/// `−0.1·2⁻ᵏ`, k = 0, 1, … until `|λ| < 1e-5·max(|λ_∞|, 1)`.
pub fn default_lambda_sequence<T: Real>(problem: &SchroedingerProblem<T>) -> Result<Vec<T>> {
    let floor = T::lit(1e-5) * lambda_infinity(problem)?.abs().max(T::one());
    let mut out = Vec::new();
    let mut l = T::lit(-0.1);
    while l.abs() >= floor {
        out.push(l);
        l = l * T::lit(0.5);
    }
    out.push(l);
    Ok(out)
}

/// `lim_{λ→0⁻} n(M(λ))` along `lambda_sequence` (negative, increasing to 0).
pub fn index_limit<T: Real>(
    problem: &SchroedingerProblem<T>,
    lambda_sequence: &[T],
    steps: usize,
) -> Result<IndexLimitReport<T>> {
    if problem.constraint_count() == 0 {
        return Ok(IndexLimitReport { limit: 0, samples: Vec::new(), poles: Vec::new() });
    }
    if let Some(bad) = lambda_sequence.iter().find(|&&l| !(l < T::zero())) {
        return Err(Error::InvalidArgument(format!("lambda sequence must be negative, found {bad}")));
    }
    if lambda_sequence.windows(2).any(|w| w[1].abs() > w[0].abs()) {
        return Err(Error::InvalidArgument("lambda sequence must approach 0 monotonically".into()));
    }
    let results: Vec<Result<ConstraintMatrixSample<T>>> =
        lambda_sequence.par_iter().map(|&l| constraint_matrix(problem, l, steps)).collect();
    let mut samples = Vec::new();
    let mut poles = Vec::new();
    for (r, &l) in results.into_iter().zip(lambda_sequence) {
        match r {
            Ok(s) => samples.push(s),
            Err(Error::ResolventPole { .. }) => poles.push(l),
            Err(e) => return Err(e),
        }
    }
    let trail = || samples.iter().map(|s| (s.lambda.to_f64_lossy(), s.negative_count)).collect::<Vec<_>>();
    let near = T::lit(1e-4) * lambda_infinity(problem)?.abs();
    let n = samples.len();
    let stable = n >= 4
        && samples[n - 1].lambda.abs() <= near
        && samples[n - 3..].iter().all(|s| s.negative_count == samples[n - 1].negative_count);
    if !stable {
        return Err(Error::NoStabilization { trail: trail() });
    }
    Ok(IndexLimitReport { limit: samples[n - 1].negative_count, samples, poles })
}

/// [`index_limit`] with the default sequence and step density.
pub fn default_index_limit<T: Real>(problem: &SchroedingerProblem<T>) -> Result<IndexLimitReport<T>> {
    let steps = steps_for(&problem.interval(), DEFAULT_STEPS_PER_UNIT);
    index_limit(problem, &default_lambda_sequence(problem)?, steps)
}
