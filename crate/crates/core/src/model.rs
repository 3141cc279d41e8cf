//! Problem instances, boundary traces and Lagrangian planes.
//!
//! Traces are ordered `(value_left, value_right, normal_left, normal_right)`
//! with outward normals, so `normal_left = −u′(left)`. With that convention
//! the symplectic form is exactly the boundary term of Green's identity.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix, Svd};
use crate::oracle;
use crate::scalar::Real;

/// Shared pointwise function `x ↦ f(x)`.
pub type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Grid size used to validate potentials and constraints at construction.
pub(crate) const VALIDATION_POINTS: usize = 1025;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<T> {
    left: T,
    right: T,
}

impl<T: Real> Interval<T> {
    pub fn new(left: T, right: T) -> Result<Self> {
        if !(left < right) || !left.is_finite() || !right.is_finite() {
            return Err(Error::InvalidInterval { left: left.to_f64_lossy(), right: right.to_f64_lossy() });
        }
        Ok(Self { left, right })
    }

    #[inline]
    pub fn left(&self) -> T {
        self.left
    }

    #[inline]
    pub fn right(&self) -> T {
        self.right
    }

    #[inline]
    pub fn length(&self) -> T {
        self.right - self.left
    }

    pub fn midpoint(&self) -> T {
        T::lit(0.5) * (self.left + self.right)
    }

    /// `other ⊆ self`, allowing rounding slack of a few ulps of the length.
    pub fn contains_interval(&self, other: &Interval<T>) -> bool {
        let slack = T::lit(1e-12) * self.length();
        other.left >= self.left - slack && other.right <= self.right + slack
    }

    /// `n` equally spaced points including both ends.
    pub fn grid(&self, n: usize) -> Vec<T> {
        let n = n.max(2);
        let h = self.length() / T::from_usize_lossy(n - 1);
        (0..n).map(|i| self.left + h * T::from_usize_lossy(i)).collect()
    }
}

/// The potential `V` of `L = −d²/dx² + V`.
#[derive(Clone)]
pub struct Potential<T> {
    eval: ScalarFn<T>,
}

impl<T: Real> Potential<T> {
    pub fn new(f: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(f) }
    }

    pub fn constant(v: T) -> Self {
        Self::new(move |_| v)
    }

    #[inline]
    pub fn value(&self, x: T) -> T {
        (self.eval)(x)
    }

    /// (inf, sup) of `V` over `n` uniform samples of `interval`.
    pub fn bounds(&self, interval: &Interval<T>, n: usize) -> Result<(T, T)> {
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for x in interval.grid(n) {
            let v = self.value(x);
            if !v.is_finite() {
                return Err(Error::UnboundedPotential { at: x.to_f64_lossy() });
            }
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Ok((lo, hi))
    }
}

impl<T> fmt::Debug for Potential<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Potential(..)")
    }
}

/// One of the functions `φᵢ` whose orthogonal complement defines the
/// constrained space.
#[derive(Clone)]
pub struct ConstraintFunction<T> {
    eval: ScalarFn<T>,
    deriv: ScalarFn<T>,
    domain: Option<Interval<T>>,
}

impl<T: Real> ConstraintFunction<T> {
    pub fn new(
        f: impl Fn(T) -> T + Send + Sync + 'static,
        df: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Self {
        Self { eval: Arc::new(f), deriv: Arc::new(df), domain: None }
    }

    pub fn constant(c: T) -> Self {
        Self::new(move |_| c, |_| T::zero())
    }

    #[inline]
    pub fn value(&self, x: T) -> T {
        (self.eval)(x)
    }

    #[inline]
    pub fn derivative(&self, x: T) -> T {
        (self.deriv)(x)
    }

    /// The subinterval this function has been restricted to, if any.
    pub fn domain(&self) -> Option<Interval<T>> {
        self.domain
    }

    /// Same evaluation maps, domain narrowed to `sub`.
    pub fn restrict(&self, sub: Interval<T>) -> Self {
        Self { eval: Arc::clone(&self.eval), deriv: Arc::clone(&self.deriv), domain: Some(sub) }
    }
}

impl<T> fmt::Debug for ConstraintFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ConstraintFunction(..)")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryCondition {
    /// `β_D`: traces with vanishing boundary values.
    Dirichlet,
    /// `β_N`: traces with vanishing normal derivatives.
    Neumann,
}

/// A constrained Schrödinger operator on an interval.
#[derive(Debug, Clone)]
pub struct SchroedingerProblem<T> {
    interval: Interval<T>,
    potential: Potential<T>,
    bc: BoundaryCondition,
    constraints: Vec<ConstraintFunction<T>>,
}

impl<T: Real> SchroedingerProblem<T> {
    /// Validates that `V` is finite on the working grid and that the sampled
    /// constraint vectors are linearly independent (Gram matrix rank with
    /// relative tolerance `1e-10`).
    pub fn new(
        interval: Interval<T>,
        potential: Potential<T>,
        bc: BoundaryCondition,
        constraints: Vec<ConstraintFunction<T>>,
    ) -> Result<Self> {
        potential.bounds(&interval, VALIDATION_POINTS)?;
        check_independent(&interval, &constraints)?;
        Ok(Self { interval, potential, bc, constraints })
    }

    pub fn interval(&self) -> Interval<T> {
        self.interval
    }

    pub fn potential(&self) -> &Potential<T> {
        &self.potential
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn constraints(&self) -> &[ConstraintFunction<T>] {
        &self.constraints
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    /// Same operator with the constraints dropped.
    pub fn unconstrained(&self) -> Self {
        Self { constraints: Vec::new(), ..self.clone() }
    }

    /// Same operator with different boundary condition.
    pub fn with_bc(&self, bc: BoundaryCondition) -> Self {
        Self { bc, ..self.clone() }
    }

    /// The problem posed on `sub ⊆ interval` with restricted constraints.
    pub fn restricted(&self, sub: Interval<T>) -> Result<Self> {
        if !self.interval.contains_interval(&sub) {
            return Err(Error::InvalidArgument("subinterval not contained in the problem interval".into()));
        }
        let constraints = self.constraints.iter().map(|c| c.restrict(sub)).collect();
        Self::new(sub, self.potential.clone(), self.bc, constraints)
    }
}

fn check_independent<T: Real>(interval: &Interval<T>, constraints: &[ConstraintFunction<T>]) -> Result<()> {
    let m = constraints.len();
    if m == 0 {
        return Ok(());
    }
    let grid = interval.grid(VALIDATION_POINTS);
    let h = interval.length() / T::from_usize_lossy(VALIDATION_POINTS - 1);
    let samples: Vec<Vec<T>> = constraints.iter().map(|c| grid.iter().map(|&x| c.value(x)).collect()).collect();
    for (s, _) in samples.iter().zip(constraints) {
        if let Some(i) = s.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("constraint not finite at x = {}", grid[i])));
        }
    }
    let mut gram = Matrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let prod: Vec<T> = samples[i].iter().zip(&samples[j]).map(|(&a, &b)| a * b).collect();
            let g = oracle::quadrature(&prod, h)?;
            gram[(i, j)] = g;
            gram[(j, i)] = g;
        }
    }
    let (values, _) = symmetric_eigen(&gram)?;
    let top = values.last().copied().unwrap_or_else(T::zero);
    let rank = values.iter().filter(|&&v| v > T::lit(1e-10) * top && v > T::zero()).count();
    if rank < m {
        return Err(Error::DependentConstraints { rank, count: m });
    }
    Ok(())
}

/// Cauchy data of a function at the two endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundaryTrace<T> {
    pub value_left: T,
    pub value_right: T,
    pub normal_left: T,
    pub normal_right: T,
}

impl<T: Real> BoundaryTrace<T> {
    pub fn new(value_left: T, value_right: T, normal_left: T, normal_right: T) -> Self {
        Self { value_left, value_right, normal_left, normal_right }
    }

    /// Trace of a function from its endpoint values and (unsigned) derivatives.
    pub fn from_endpoints(u_left: T, du_left: T, u_right: T, du_right: T) -> Self {
        Self::new(u_left, u_right, -du_left, du_right)
    }

    pub fn to_array(self) -> [T; 4] {
        [self.value_left, self.value_right, self.normal_left, self.normal_right]
    }

    pub fn from_array(a: [T; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn norm(&self) -> T {
        self.to_array().iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// `ω(a, b) = ⟨b_normal, a_value⟩ − ⟨a_normal, b_value⟩`.
///
/// For traces of `u`, `v` this equals `∫(u v″ − v u″)`.
pub fn symplectic_form<T: Real>(a: &BoundaryTrace<T>, b: &BoundaryTrace<T>) -> T {
    (b.normal_left * a.value_left + b.normal_right * a.value_right)
        - (a.normal_left * b.value_left + a.normal_right * b.value_right)
}

/// Tolerance on `|ω(c, d)| / (|c| |d|)` for a frame to count as isotropic.
pub const ISOTROPY_TOL: f64 = 1e-8;
/// Relative singular-value floor for frame columns.
pub const FRAME_RANK_TOL: f64 = 1e-10;
/// Default relative tolerance for [`intersection_dimension`].
pub const DEFAULT_INTERSECTION_TOL: f64 = 1e-8;

/// An isotropic subspace of the 4-dimensional trace space, spanned by one or
/// two traces.
///
/// The frame is orthonormalised on construction; the original columns are
/// kept so kernel vectors can be expressed in terms of them.
#[derive(Debug, Clone)]
pub struct LagrangianPlane<T> {
    raw: Vec<BoundaryTrace<T>>,
    frame: Vec<[T; 4]>,
    /// `frame = raw · transform` (k × k, upper triangular).
    transform: Matrix<T>,
    isotropy_defect: T,
}

impl<T: Real> LagrangianPlane<T> {
    pub fn new(columns: Vec<BoundaryTrace<T>>) -> Result<Self> {
        let k = columns.len();
        if k == 0 || k > 2 || columns.iter().any(|c| !c.is_finite()) {
            return Err(Error::RankDeficientPlane);
        }
        let mut a = Matrix::zeros(4, k);
        for (j, c) in columns.iter().enumerate() {
            for (i, v) in c.to_array().into_iter().enumerate() {
                a[(i, j)] = v;
            }
        }
        let svd = Svd::new(&a);
        let smallest = svd.singular_values[k - 1];
        if !(smallest > T::lit(FRAME_RANK_TOL) * svd.largest()) {
            return Err(Error::RankDeficientPlane);
        }
        let mut defect = T::zero();
        for i in 0..k {
            for j in 0..k {
                let w = symplectic_form(&columns[i], &columns[j]).abs();
                defect = defect.max(w / (columns[i].norm() * columns[j].norm()));
            }
        }
        if !(defect <= T::lit(ISOTROPY_TOL)) {
            return Err(Error::NotIsotropic { defect: defect.to_f64_lossy() });
        }
        // modified Gram-Schmidt, tracking the coefficient transform
        let mut frame: Vec<[T; 4]> = Vec::with_capacity(k);
        let mut transform = Matrix::identity(k);
        for j in 0..k {
            let mut v = columns[j].to_array();
            let mut coeffs: Vec<T> = (0..k).map(|i| if i == j { T::one() } else { T::zero() }).collect();
            for (p, q) in frame.iter().enumerate() {
                let dot: T = (0..4).map(|i| v[i] * q[i]).sum();
                for i in 0..4 {
                    v[i] = v[i] - dot * q[i];
                }
                for i in 0..k {
                    coeffs[i] = coeffs[i] - dot * transform[(i, p)];
                }
            }
            let norm = v.iter().map(|&x| x * x).sum::<T>().sqrt();
            for x in &mut v {
                *x = *x / norm;
            }
            for i in 0..k {
                transform[(i, j)] = coeffs[i] / norm;
            }
            frame.push(v);
        }
        Ok(Self { raw: columns, frame, transform, isotropy_defect: defect })
    }

    pub fn dim(&self) -> usize {
        self.frame.len()
    }

    /// Orthonormal frame columns.
    pub fn frame(&self) -> &[[T; 4]] {
        &self.frame
    }

    /// The traces the plane was built from.
    pub fn columns(&self) -> &[BoundaryTrace<T>] {
        &self.raw
    }

    /// Largest `|ω(c, d)| / (|c| |d|)` over the input columns.
    pub fn isotropy_defect(&self) -> T {
        self.isotropy_defect
    }

    /// The 2 × k block of trace components that `β` annihilates, in the
    /// orthonormal frame.
    pub fn boundary_block(&self, bc: BoundaryCondition) -> Matrix<T> {
        let rows: [usize; 2] = match bc {
            BoundaryCondition::Dirichlet => [0, 1],
            BoundaryCondition::Neumann => [2, 3],
        };
        let mut b = Matrix::zeros(2, self.dim());
        for (r, &row) in rows.iter().enumerate() {
            for (j, col) in self.frame.iter().enumerate() {
                b[(r, j)] = col[row];
            }
        }
        b
    }

    /// Basis of `plane ∩ β`, each vector given as coefficients on the input
    /// columns.
    pub fn intersection_kernel(&self, bc: BoundaryCondition, tol: T) -> Vec<Vec<T>> {
        let block = self.boundary_block(bc);
        let svd = Svd::new(&block);
        let nullity = svd.singular_values.iter().filter(|&&s| s < tol).count();
        svd.trailing_right_vectors(nullity)
            .into_iter()
            .map(|y| self.transform.mul_vec(&y))
            .collect()
    }
}

/// Dimension of `plane ∩ β`.
///
/// Computed as the number of singular values of the β-annihilated 2 × k
/// block below `tol`. The frame is orthonormal, so its own largest singular
/// value (the reference scale) is one.
pub fn intersection_dimension<T: Real>(plane: &LagrangianPlane<T>, bc: BoundaryCondition, tol: T) -> Result<usize> {
    if plane.dim() == 0 {
        return Err(Error::RankDeficientPlane);
    }
    let svd = Svd::new(&plane.boundary_block(bc));
    Ok(svd.singular_values.iter().filter(|&&s| s < tol).count())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossingKind {
    LambdaSweep,
    DomainSweep,
}

/// A detected intersection with `β` along a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingRecord<T> {
    /// λ or t at the crossing.
    pub parameter: T,
    pub dimension: usize,
    /// `(n₊, n₋)` of the crossing form.
    pub signature: (usize, usize),
    /// Eigenvalues of the crossing form on the intersection.
    pub form_values: Vec<T>,
    pub kind: CrossingKind,
}

impl<T: Real> CrossingRecord<T> {
    pub fn new(parameter: T, dimension: usize, form_values: Vec<T>, kind: CrossingKind, zero_tol: T) -> Self {
        let plus = form_values.iter().filter(|&&v| v > zero_tol).count();
        let minus = form_values.iter().filter(|&&v| v < -zero_tol).count();
        Self { parameter, dimension, signature: (plus, minus), form_values, kind }
    }

    pub fn is_negative_definite(&self) -> bool {
        self.signature.0 == 0 && self.signature.1 == self.dimension
    }
}
