//! Finite-difference route: the quadratic form as a symmetric matrix and
//! its negative index by Sylvester inertia.

use crate::error::{Error, Result};
use crate::linalg::{bunch_kaufman, tridiagonal_ldlt, Factored, Householder, Inertia, Matrix};
use crate::model::{BoundaryCondition, ConstraintFunction, SchroedingerProblem};
use crate::scalar::Real;

/// Default number of interior grid nodes.
pub const DEFAULT_INTERIOR_NODES: usize = 400;

/// Matrix of the form `D(u, v) = ∫ u′v′ + V u v` on grid functions.
///
/// Rows are expressed in mass-weighted coordinates `y = W^{1/2} u` (trapezoid
/// weights), so the eigenvalues approximate those of `−d²/dx² + V` and the
/// discrete inner product is Euclidean.
#[derive(Debug, Clone)]
pub struct DiscreteForm<T> {
    pub size: usize,
    pub matrix: Matrix<T>,
    pub grid: Vec<T>,
    /// Grid spacing `h`.
    pub mass_scale: T,
    /// Square roots of the trapezoid weights at `grid`.
    pub sqrt_weights: Vec<T>,
    /// Number of constraints already compressed away.
    pub constraint_count: usize,
    tridiagonal: bool,
}

impl<T: Real> DiscreteForm<T> {
    /// Wraps an arbitrary symmetric matrix (unit weights, no grid).
    pub fn from_matrix(matrix: Matrix<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch("form matrix must be square".into()));
        }
        let defect = matrix.asymmetry();
        if defect > T::zero() {
            return Err(Error::NotSymmetric { defect: defect.to_f64_lossy() });
        }
        let n = matrix.rows();
        Ok(Self {
            size: n,
            matrix,
            grid: Vec::new(),
            mass_scale: T::one(),
            sqrt_weights: vec![T::one(); n],
            constraint_count: 0,
            tridiagonal: false,
        })
    }

    pub fn is_tridiagonal(&self) -> bool {
        self.tridiagonal
    }

    /// Smallest Gershgorin disc lower bound.
    pub fn gershgorin_lower_bound(&self) -> T {
        (0..self.size)
            .map(|i| {
                let off: T = (0..self.size).filter(|&j| j != i).map(|j| self.matrix[(i, j)].abs()).sum();
                self.matrix[(i, i)] - off
            })
            .fold(T::infinity(), T::min)
    }
}

/// Three-point discretisation of the problem's quadratic form.
///
/// Dirichlet drops the boundary nodes (`n_interior` unknowns); Neumann keeps
/// them with half weights, which is the symmetric form of the ghost-node
/// reflection (`n_interior + 2` unknowns).
pub fn assemble<T: Real>(problem: &SchroedingerProblem<T>, n_interior: usize) -> Result<DiscreteForm<T>> {
    if n_interior < 8 {
        return Err(Error::InvalidArgument(format!("n_interior = {n_interior} < 8")));
    }
    let iv = problem.interval();
    let h = iv.length() / T::from_usize_lossy(n_interior + 1);
    let inv_h2 = T::one() / (h * h);
    let two = T::lit(2.0);
    let node = |i: usize| if i == n_interior + 1 { iv.right() } else { iv.left() + h * T::from_usize_lossy(i) };
    let (grid, sqrt_weights, off_end): (Vec<T>, Vec<T>, T) = match problem.bc() {
        BoundaryCondition::Dirichlet => ((1..=n_interior).map(node).collect(), vec![h.sqrt(); n_interior], T::one()),
        BoundaryCondition::Neumann => {
            let mut w = vec![h.sqrt(); n_interior + 2];
            w[0] = (h / two).sqrt();
            w[n_interior + 1] = w[0];
            ((0..n_interior + 2).map(node).collect(), w, two.sqrt())
        }
    };
    let n = grid.len();
    let mut matrix = Matrix::zeros(n, n);
    for (i, &x) in grid.iter().enumerate() {
        matrix[(i, i)] = two * inv_h2 + problem.potential().value(x);
        if i + 1 < n {
            let end = problem.bc() == BoundaryCondition::Neumann && (i == 0 || i + 2 == n);
            let e = -(if end { off_end } else { T::one() }) * inv_h2;
            matrix[(i, i + 1)] = e;
            matrix[(i + 1, i)] = e;
        }
    }
    if matrix[(0, 0)].is_nan() || grid.iter().any(|x| !problem.potential().value(*x).is_finite()) {
        return Err(Error::UnboundedPotential { at: iv.left().to_f64_lossy() });
    }
    Ok(DiscreteForm {
        size: n,
        matrix,
        grid,
        mass_scale: h,
        sqrt_weights,
        constraint_count: 0,
        tridiagonal: true,
    })
}

/// Compresses the form onto the discrete orthogonal complement of the
/// weighted constraint samples.
pub fn constrain<T: Real>(form: &DiscreteForm<T>, constraints: &[ConstraintFunction<T>]) -> Result<DiscreteForm<T>> {
    let m = constraints.len();
    if m == 0 {
        return Ok(form.clone());
    }
    if form.grid.len() != form.size || m >= form.size {
        return Err(Error::DimensionMismatch("constraints need an uncompressed grid form".into()));
    }
    let cols: Vec<Vec<T>> = constraints
        .iter()
        .map(|c| form.grid.iter().zip(&form.sqrt_weights).map(|(&x, &w)| w * c.value(x)).collect())
        .collect();
    let scale = cols
        .iter()
        .map(|c| c.iter().map(|&v| v * v).sum::<T>().sqrt())
        .fold(T::zero(), T::max);
    let qr = Householder::new(&cols);
    let rank = qr.r_diagonal.iter().filter(|r| r.abs() > T::lit(1e-10) * scale).count();
    if rank < m {
        return Err(Error::DependentConstraints { rank, count: m });
    }
    let full = qr.congruence(&form.matrix);
    let k = form.size - m;
    let mut matrix = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            matrix[(i, j)] = full[(m + i, m + j)];
        }
    }
    matrix.symmetrize();
    Ok(DiscreteForm {
        size: k,
        matrix,
        grid: form.grid.clone(),
        mass_scale: form.mass_scale,
        sqrt_weights: form.sqrt_weights.clone(),
        constraint_count: form.constraint_count + m,
        tridiagonal: false,
    })
}

/// Eigenvalue count below a shift, with the perturbation applied (if any).
#[derive(Debug, Clone, Copy)]
pub struct InertiaReport<T> {
    pub below: usize,
    pub inertia: Inertia,
    /// Amount subtracted from the shift after a near-zero pivot.
    pub perturbation: Option<T>,
}

fn factor_shifted<T: Real>(form: &DiscreteForm<T>, shift: T) -> Factored<T> {
    if form.tridiagonal {
        let n = form.size;
        let diag: Vec<T> = (0..n).map(|i| form.matrix[(i, i)] - shift).collect();
        let off: Vec<T> = (0..n.saturating_sub(1)).map(|i| form.matrix[(i, i + 1)]).collect();
        tridiagonal_ldlt(&diag, &off)
    } else {
        let mut a = form.matrix.clone();
        for i in 0..form.size {
            a[(i, i)] = a[(i, i)] - shift;
        }
        bunch_kaufman(&a)
    }
}

/// Number of eigenvalues strictly below `shift`, from the pivot signs of
/// an LDLᵀ factorisation of `matrix − shift·I`.
///
/// A pivot smaller than `1e-12 × ‖A‖` means the shift sits on an eigenvalue
/// to working precision; the shift is then lowered by `1e-10 × ‖A‖` and the
/// perturbation is reported.
pub fn inertia_report<T: Real>(form: &DiscreteForm<T>, shift: T) -> Result<InertiaReport<T>> {
    if form.size == 0 {
        return Ok(InertiaReport { below: 0, inertia: Inertia::default(), perturbation: None });
    }
    let norm = form.matrix.max_abs().max(shift.abs()).max(T::min_positive_value());
    let floor = T::lit(1e-12) * norm;
    let f = factor_shifted(form, shift);
    if f.min_pivot >= floor && f.inertia.zero == 0 {
        return Ok(InertiaReport { below: f.inertia.negative, inertia: f.inertia, perturbation: None });
    }
    let delta = T::lit(1e-10) * norm;
    let g = factor_shifted(form, shift - delta);
    if g.min_pivot < floor || g.inertia.zero > 0 {
        return Err(Error::ShiftAtEigenvalue);
    }
    Ok(InertiaReport { below: g.inertia.negative, inertia: g.inertia, perturbation: Some(delta) })
}

pub fn inertia_below<T: Real>(form: &DiscreteForm<T>, shift: T) -> Result<usize> {
    inertia_report(form, shift).map(|r| r.below)
}

/// `n(𝓛_c)` by the direct route.
pub fn constrained_morse_index<T: Real>(problem: &SchroedingerProblem<T>, n_interior: usize) -> Result<usize> {
    let form = assemble(problem, n_interior)?;
    let c = constrain(&form, problem.constraints())?;
    inertia_below(&c, T::zero())
}

/// `n(𝓛)` by the direct route.
pub fn unconstrained_morse_index<T: Real>(problem: &SchroedingerProblem<T>, n_interior: usize) -> Result<usize> {
    inertia_below(&assemble(problem, n_interior)?, T::zero())
}
