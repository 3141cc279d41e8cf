//! The λ-sweep: count crossings of the constrained Cauchy-data plane with
//! the boundary plane as λ runs from below the spectrum up to zero.
//!
//! Crossings are located as zeros of a bordered determinant
//!
//! ```text
//!         ┌ W(λ) ┐   m rows: wᵢ(right) of the 2+m parameter images
//! E(λ) =  │      │
//!         └ B(λ) ┘   2 rows: the β-annihilated trace components
//! ```
//!
//! which vanishes exactly when some constrained solution has vanishing
//! β-components. Its sign does not depend on any basis choice, which keeps
//! bracketing reliable. Each root is then confirmed on the plane itself.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{determinant, symmetric_eigen, Matrix, Svd};
use crate::model::{
    BoundaryCondition, CrossingKind, CrossingRecord, LagrangianPlane, SchroedingerProblem, DEFAULT_INTERSECTION_TOL,
};
use crate::oracle::quadrature;
use crate::scalar::Real;
use crate::scan::{bisect, candidates, golden_min, Candidate};
use crate::shooting::{
    constrained_basis, constraint_map, endpoint_images, steps_for, trace_plane, unit_vectors,
    ConstrainedSolutionBasis, DEFAULT_STEPS_PER_UNIT,
};

/// Default number of λ-grid cells.
pub const DEFAULT_LAMBDA_GRID: usize = 512;

#[derive(Debug, Clone, Copy)]
pub struct SweepOptions<T> {
    pub grid_points: usize,
    pub steps_per_unit: usize,
    pub intersection_tol: T,
}

impl<T: Real> Default for SweepOptions<T> {
    fn default() -> Self {
        Self {
            grid_points: DEFAULT_LAMBDA_GRID,
            steps_per_unit: DEFAULT_STEPS_PER_UNIT,
            intersection_tol: T::lit(DEFAULT_INTERSECTION_TOL),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LambdaSweepReport<T> {
    pub lambda_infinity: T,
    /// Crossings with λ < 0, in increasing λ.
    pub crossings: Vec<CrossingRecord<T>>,
    pub maslov_index: i64,
    pub morse_index: usize,
    /// `dim ker 𝓛_c`, reported separately from the Morse count.
    pub kernel_dimension: usize,
    /// Every crossing form was negative definite.
    pub monotone: bool,
    /// `(λ, E(λ))` on the sweep grid.
    pub samples: Vec<(T, T)>,
}

/// A λ below which `μ_c(λ)` cannot meet `β`: `inf V − (1 + 0.01·|inf V|)`.
pub fn lambda_infinity<T: Real>(problem: &SchroedingerProblem<T>) -> Result<T> {
    let (inf, _) = problem.potential().bounds(&problem.interval(), 4097)?;
    Ok(inf - (T::one() + T::lit(0.01) * inf.abs()))
}

fn boundary_rows<T: Real>(bc: BoundaryCondition, img: &crate::shooting::Endpoint<T>) -> [T; 2] {
    match bc {
        BoundaryCondition::Dirichlet => [img.u_left, img.u_right],
        BoundaryCondition::Neumann => [-img.du_left, img.du_right],
    }
}

/// The bordered determinant `E(λ)` with rows scaled to unit length.
pub fn evans_determinant<T: Real>(problem: &SchroedingerProblem<T>, lambda: T, steps: usize) -> Result<T> {
    let m = problem.constraint_count();
    let iv = problem.interval();
    let images = endpoint_images(problem, lambda, &iv, &unit_vectors(m + 2), steps)?;
    let w = constraint_map(&images, m);
    let mut e = Matrix::zeros(m + 2, m + 2);
    for (j, img) in images.iter().enumerate() {
        for i in 0..m {
            e[(i, j)] = w[(i, j)];
        }
        let b = boundary_rows(problem.bc(), img);
        e[(m, j)] = b[0];
        e[(m + 1, j)] = b[1];
    }
    e.equilibrate_rows();
    determinant(&e)
}

/// `−∫ u²` for `u = Σ cₖ uₖ` over the basis grid.
pub fn crossing_form_lambda<T: Real>(basis: &ConstrainedSolutionBasis<T>, kernel_vector: &[T]) -> Result<T> {
    if kernel_vector.iter().all(|&c| c == T::zero()) {
        return Err(Error::ZeroKernelVector);
    }
    let u = basis.combine(kernel_vector);
    let sq: Vec<T> = u.iter().map(|&x| x * x).collect();
    Ok(-quadrature(&sq, basis.step())?)
}

/// Matrix of the bilinear crossing form `−∫ uⱼ uₖ` on kernel vectors.
pub(crate) fn lambda_form_matrix<T: Real>(basis: &ConstrainedSolutionBasis<T>, kernel: &[Vec<T>]) -> Result<Matrix<T>> {
    let d = kernel.len();
    let us: Vec<Vec<T>> = kernel.iter().map(|k| basis.combine(k)).collect();
    let mut q = Matrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let prod: Vec<T> = us[i].iter().zip(&us[j]).map(|(&a, &b)| a * b).collect();
            let v = -quadrature(&prod, basis.step())?;
            q[(i, j)] = v;
            q[(j, i)] = v;
        }
    }
    Ok(q)
}

/// Constrained basis at `lambda`, nudging λ off isolated constraint
/// degeneracies.
pub(crate) fn basis_near<T: Real>(
    problem: &SchroedingerProblem<T>,
    lambda: T,
    steps: usize,
    scale: T,
) -> Result<ConstrainedSolutionBasis<T>> {
    let iv = problem.interval();
    match constrained_basis(problem, lambda, &iv, steps) {
        Err(Error::ConstraintDegeneracy { .. }) => {
            constrained_basis(problem, lambda + T::lit(1e-6) * scale.max(T::one()), &iv, steps)
        }
        other => other,
    }
}

/// The Cauchy-data plane `μ_c(λ)` on the full interval.
pub fn cauchy_plane<T: Real>(problem: &SchroedingerProblem<T>, lambda: T, steps: usize) -> Result<LagrangianPlane<T>> {
    trace_plane(&basis_near(problem, lambda, steps, lambda.abs())?)
}

/// Largest singular value of the β-block: zero iff the plane lies in β.
fn full_containment_distance<T: Real>(problem: &SchroedingerProblem<T>, lambda: T, steps: usize) -> Result<T> {
    let plane = cauchy_plane(problem, lambda, steps)?;
    Ok(Svd::new(&plane.boundary_block(problem.bc())).largest())
}

struct Confirmed<T> {
    dimension: usize,
    form_values: Vec<T>,
}

fn confirm<T: Real>(problem: &SchroedingerProblem<T>, lambda: T, steps: usize, tol: T, scale: T) -> Result<Confirmed<T>> {
    let basis = basis_near(problem, lambda, steps, scale)?;
    let plane = trace_plane(&basis)?;
    let kernel = plane.intersection_kernel(problem.bc(), tol);
    let q = lambda_form_matrix(&basis, &kernel)?;
    let (form_values, _) = symmetric_eigen(&q)?;
    Ok(Confirmed { dimension: kernel.len(), form_values })
}

/// Sweeps λ over `[λ_∞, 0]` and counts crossings.
pub fn sweep<T: Real>(problem: &SchroedingerProblem<T>, opts: &SweepOptions<T>) -> Result<LambdaSweepReport<T>> {
    if opts.grid_points < 64 {
        return Err(Error::InvalidArgument(format!("grid_points = {} < 64", opts.grid_points)));
    }
    let steps = steps_for(&problem.interval(), opts.steps_per_unit);
    let lam_inf = lambda_infinity(problem)?;
    let scale = lam_inf.abs();
    let g = opts.grid_points;
    let grid: Vec<T> = (0..=g)
        .map(|i| if i == g { T::zero() } else { lam_inf - lam_inf * T::from_usize_lossy(i) / T::from_usize_lossy(g) })
        .collect();
    let values: Vec<T> = grid
        .par_iter()
        .map(|&l| evans_determinant(problem, l, steps))
        .collect::<Result<Vec<_>>>()?;
    let e = |l: T| evans_determinant(problem, l, steps);
    let root_tol = T::lit(1e-10) * scale;
    let zero_band = T::lit(1e-8) * scale;
    let tol = opts.intersection_tol;

    let mut roots: Vec<(T, Option<usize>)> = Vec::new();
    for cand in candidates(&values) {
        match cand {
            Candidate::Exact(i) => roots.push((grid[i], None)),
            Candidate::SignChange(i) => roots.push((bisect(e, grid[i], values[i], grid[i + 1], root_tol)?, None)),
            Candidate::Tangency(i) => {
                let (lo, hi) = (grid[i - 1], grid[i + 1]);
                let (at, _) = golden_min(|l| full_containment_distance(problem, l, steps), lo, hi, root_tol)?;
                let c = confirm(problem, at, steps, tol, scale)?;
                if c.dimension == 2 {
                    roots.push((at, Some(2)));
                    continue;
                }
                let s = values[i].signum();
                let (_, dip) = golden_min(|l| e(l).map(|v| s * v), lo, hi, root_tol)?;
                if dip < T::zero() {
                    return Err(Error::IncreaseGrid { near: grid[i].to_f64_lossy() });
                }
            }
        }
    }
    roots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));

    let mut crossings = Vec::new();
    for (root, _) in roots {
        if root.abs() <= zero_band {
            continue;
        }
        if (root - lam_inf).abs() <= zero_band {
            return Err(Error::CrossingAtLambdaInfinity { at: root.to_f64_lossy() });
        }
        let c = confirm(problem, root, steps, tol, scale)?;
        if c.dimension == 0 {
            return Err(Error::SpuriousRoot { at: root.to_f64_lossy() });
        }
        crossings.push(CrossingRecord::new(root, c.dimension, c.form_values, CrossingKind::LambdaSweep, T::lit(1e-12)));
    }
    let kernel_dimension = confirm(problem, T::zero(), steps, tol, scale)?.dimension;
    let morse_index: usize = crossings.iter().map(|c| c.dimension).sum();
    let monotone = crossings.iter().all(CrossingRecord::is_negative_definite);
    Ok(LambdaSweepReport {
        lambda_infinity: lam_inf,
        crossings,
        maslov_index: -(morse_index as i64),
        morse_index,
        kernel_dimension,
        monotone,
        samples: grid.into_iter().zip(values).collect(),
    })
}
