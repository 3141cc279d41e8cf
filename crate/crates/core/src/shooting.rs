//! Constrained solution spaces by shooting.
//!
//! Solutions of `u″ = (V − λ)u − Σ aᵢφᵢ` are integrated together with the
//! accumulators `wᵢ(x) = ∫ₗˣ u φᵢ`. The multipliers `aᵢ` ride along as
//! constants. Every quantity is linear in the initial parameters
//! `(u(l), u′(l), a₁, …, a_m)`, so the constraints `wᵢ(r) = 0` cut out a
//! linear subspace of parameter space whose image is `K_c(λ)`.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Svd};
use crate::model::{BoundaryTrace, ConstraintFunction, Interval, LagrangianPlane, Potential, SchroedingerProblem};
use crate::scalar::Real;

/// Default RK4 resolution.
pub const DEFAULT_STEPS_PER_UNIT: usize = 2048;
/// Relative singular-value floor below which the constraint map loses rank.
pub const CONSTRAINT_RANK_TOL: f64 = 1e-10;

/// Step count for `sub` at `per_unit` steps per unit length: at least 16, even.
pub fn steps_for<T: Real>(sub: &Interval<T>, per_unit: usize) -> usize {
    let raw = (sub.length() * T::from_usize_lossy(per_unit)).ceil().to_usize().unwrap_or(16);
    let n = raw.max(16);
    n + n % 2
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedState<T> {
    pub u: T,
    pub uprime: T,
    pub multipliers: Vec<T>,
    pub accumulators: Vec<T>,
}

impl<T: Real> ExtendedState<T> {
    /// Accumulators start at zero.
    pub fn new(u: T, uprime: T, multipliers: Vec<T>) -> Self {
        let m = multipliers.len();
        Self { u, uprime, multipliers, accumulators: vec![T::zero(); m] }
    }

    /// From a parameter vector `(u, u′, a₁, …, a_m)`.
    pub fn from_parameters(p: &[T]) -> Self {
        Self::new(p[0], p[1], p[2..].to_vec())
    }
}

/// Samples of an integrated extended solution on a uniform grid.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub positions: Vec<T>,
    pub u: Vec<T>,
    pub uprime: Vec<T>,
    pub multipliers: Vec<T>,
    /// `wᵢ` at the right end.
    pub accumulators: Vec<T>,
    pub step: T,
}

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn trace(&self) -> BoundaryTrace<T> {
        let n = self.len() - 1;
        BoundaryTrace::from_endpoints(self.u[0], self.uprime[0], self.u[n], self.uprime[n])
    }

    pub fn sup_norm(&self) -> T {
        self.u.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    fn scale(&mut self, s: T) {
        for v in self.u.iter_mut().chain(self.uprime.iter_mut()) {
            *v = *v * s;
        }
        for v in self.multipliers.iter_mut().chain(self.accumulators.iter_mut()) {
            *v = *v * s;
        }
    }
}

/// Endpoint data of one integration.
#[derive(Debug, Clone)]
pub(crate) struct Endpoint<T> {
    pub u_left: T,
    pub du_left: T,
    pub u_right: T,
    pub du_right: T,
    pub accumulators: Vec<T>,
}

/// Core RK4 loop for `u″ = (V − λ)u − Σ aᵢ fᵢ`, `wᵢ′ = u fᵢ`.
pub(crate) fn integrate_forced<T: Real>(
    potential: &Potential<T>,
    forcings: &[ConstraintFunction<T>],
    lambda: T,
    sub: &Interval<T>,
    init: &ExtendedState<T>,
    steps: usize,
    record: bool,
) -> Result<(Endpoint<T>, Option<Trajectory<T>>)> {
    let m = forcings.len();
    if init.multipliers.len() != m || init.accumulators.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "state carries {} multipliers / {} accumulators for {m} constraints",
            init.multipliers.len(),
            init.accumulators.len()
        )));
    }
    if steps < 16 {
        return Err(Error::InvalidArgument(format!("steps = {steps} < 16")));
    }
    let h = sub.length() / T::from_usize_lossy(steps);
    let half = T::lit(0.5) * h;
    let sixth = h / T::lit(6.0);
    let two = T::lit(2.0);
    let a = &init.multipliers;

    // (V − λ, Σ aᵢφᵢ, φ₁..φ_m) at a point
    let coeffs = |x: T, phis: &mut [T]| -> (T, T) {
        let mut force = T::zero();
        for (i, f) in forcings.iter().enumerate() {
            let p = f.value(x);
            phis[i] = p;
            force = force + a[i] * p;
        }
        (potential.value(x) - lambda, force)
    };

    let mut u = init.u;
    let mut v = init.uprime;
    let mut w = init.accumulators.clone();
    let mut phi0 = vec![T::zero(); m];
    let mut phim = vec![T::zero(); m];
    let mut phi1 = vec![T::zero(); m];

    let mut rec = record.then(|| {
        let mut t = Trajectory {
            positions: Vec::with_capacity(steps + 1),
            u: Vec::with_capacity(steps + 1),
            uprime: Vec::with_capacity(steps + 1),
            multipliers: a.clone(),
            accumulators: Vec::new(),
            step: h,
        };
        t.positions.push(sub.left());
        t.u.push(u);
        t.uprime.push(v);
        t
    });

    let (mut q0, mut f0) = coeffs(sub.left(), &mut phi0);
    for k in 0..steps {
        let x = sub.left() + h * T::from_usize_lossy(k);
        let x1 = if k + 1 == steps { sub.right() } else { sub.left() + h * T::from_usize_lossy(k + 1) };
        let (qm, fm) = coeffs(x + half, &mut phim);
        let (q1, f1) = coeffs(x1, &mut phi1);

        let k1u = v;
        let k1v = q0 * u - f0;
        let u2 = u + half * k1u;
        let v2 = v + half * k1v;
        let k2u = v2;
        let k2v = qm * u2 - fm;
        let u3 = u + half * k2u;
        let v3 = v + half * k2v;
        let k3u = v3;
        let k3v = qm * u3 - fm;
        let u4 = u + h * k3u;
        let v4 = v + h * k3v;
        let k4u = v4;
        let k4v = q1 * u4 - f1;

        for i in 0..m {
            let kw = phi0[i] * u + two * phim[i] * (u2 + u3) + phi1[i] * u4;
            w[i] = w[i] + sixth * kw;
        }
        u = u + sixth * (k1u + two * (k2u + k3u) + k4u);
        v = v + sixth * (k1v + two * (k2v + k3v) + k4v);

        if !(u.is_finite() && v.is_finite()) {
            return Err(Error::BlowUp { at: x1.to_f64_lossy() });
        }
        if let Some(t) = rec.as_mut() {
            t.positions.push(x1);
            t.u.push(u);
            t.uprime.push(v);
        }
        q0 = q1;
        f0 = f1;
        std::mem::swap(&mut phi0, &mut phi1);
    }
    if w.iter().any(|x| !x.is_finite()) {
        return Err(Error::BlowUp { at: sub.right().to_f64_lossy() });
    }
    let end = Endpoint {
        u_left: init.u,
        du_left: init.uprime,
        u_right: u,
        du_right: v,
        accumulators: w.clone(),
    };
    if let Some(t) = rec.as_mut() {
        t.accumulators = w;
    }
    Ok((end, rec))
}

/// Integrates the extended system for `problem`'s potential and
/// constraints on `sub` with `steps` fixed RK4 steps.
pub fn integrate_extended<T: Real>(
    problem: &SchroedingerProblem<T>,
    lambda: T,
    sub: &Interval<T>,
    init: &ExtendedState<T>,
    steps: usize,
) -> Result<Trajectory<T>> {
    let (_, traj) = integrate_forced(problem.potential(), problem.constraints(), lambda, sub, init, steps, true)?;
    Ok(traj.expect("recording requested"))
}

/// Endpoint data for each parameter vector in `params`.
pub(crate) fn endpoint_images<T: Real>(
    problem: &SchroedingerProblem<T>,
    lambda: T,
    sub: &Interval<T>,
    params: &[Vec<T>],
    steps: usize,
) -> Result<Vec<Endpoint<T>>> {
    params
        .iter()
        .map(|p| {
            let init = ExtendedState::from_parameters(p);
            integrate_forced(problem.potential(), problem.constraints(), lambda, sub, &init, steps, false).map(|r| r.0)
        })
        .collect()
}

/// Unit vectors of `ℝⁿ`.
pub(crate) fn unit_vectors<T: Real>(n: usize) -> Vec<Vec<T>> {
    (0..n)
        .map(|j| (0..n).map(|i| if i == j { T::one() } else { T::zero() }).collect())
        .collect()
}

/// The m × (2+m) linear map from initial parameters to `wᵢ(right)`.
pub(crate) fn constraint_map<T: Real>(images: &[Endpoint<T>], m: usize) -> Matrix<T> {
    let mut w = Matrix::zeros(m, images.len());
    for (j, img) in images.iter().enumerate() {
        for i in 0..m {
            w[(i, j)] = img.accumulators[i];
        }
    }
    w
}

/// A basis of `K_c(λ)` on a subinterval.
#[derive(Debug, Clone)]
pub struct ConstrainedSolutionBasis<T> {
    pub lambda: T,
    pub subinterval: Interval<T>,
    pub basis: Vec<Trajectory<T>>,
    /// Initial parameters `(u(l), u′(l), a…)` of each basis element.
    pub parameters: Vec<Vec<T>>,
    pub dim: usize,
}

impl<T: Real> ConstrainedSolutionBasis<T> {
    /// `Σ cₖ uₖ` sampled on the shared grid.
    pub fn combine(&self, coefficients: &[T]) -> Vec<T> {
        let n = self.basis.first().map_or(0, Trajectory::len);
        let mut out = vec![T::zero(); n];
        for (c, b) in coefficients.iter().zip(&self.basis) {
            for (o, &u) in out.iter_mut().zip(&b.u) {
                *o = *o + *c * u;
            }
        }
        out
    }

    pub fn step(&self) -> T {
        self.basis.first().map_or_else(T::zero, |b| b.step)
    }
}

/// Builds a basis of the constrained weak-solution space on `sub`.
///
/// Each basis trajectory is scaled to unit supremum norm.
pub fn constrained_basis<T: Real>(
    problem: &SchroedingerProblem<T>,
    lambda: T,
    sub: &Interval<T>,
    steps: usize,
) -> Result<ConstrainedSolutionBasis<T>> {
    let m = problem.constraint_count();
    let params = unit_vectors::<T>(m + 2);
    let coeffs: Vec<Vec<T>> = if m == 0 {
        params
    } else {
        let images = endpoint_images(problem, lambda, sub, &params, steps)?;
        let w = constraint_map(&images, m);
        let svd = Svd::new(&w);
        let rank = svd.rank(T::lit(CONSTRAINT_RANK_TOL), svd.largest());
        if rank < m {
            return Err(Error::ConstraintDegeneracy { rank, expected: m });
        }
        svd.trailing_right_vectors(2)
    };
    let mut basis = Vec::with_capacity(coeffs.len());
    let mut parameters = Vec::with_capacity(coeffs.len());
    for c in coeffs {
        let init = ExtendedState::from_parameters(&c);
        let (_, traj) = integrate_forced(problem.potential(), problem.constraints(), lambda, sub, &init, steps, true)?;
        let mut traj = traj.expect("recording requested");
        let s = T::one() / traj.sup_norm();
        traj.scale(s);
        parameters.push(c.into_iter().map(|x| x * s).collect());
        basis.push(traj);
    }
    let dim = basis.len();
    Ok(ConstrainedSolutionBasis { lambda, subinterval: *sub, basis, parameters, dim })
}

/// Traces of a two-dimensional constrained basis.
pub fn trace_plane<T: Real>(basis: &ConstrainedSolutionBasis<T>) -> Result<LagrangianPlane<T>> {
    if basis.dim != 2 {
        return Err(Error::NonGenericSolutionSpace { dim: basis.dim });
    }
    LagrangianPlane::new(basis.basis.iter().map(Trajectory::trace).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{intersection_dimension, BoundaryCondition};

    fn free(interval: (f64, f64), v: f64, constraints: Vec<ConstraintFunction<f64>>) -> SchroedingerProblem<f64> {
        SchroedingerProblem::new(
            Interval::new(interval.0, interval.1).unwrap(),
            Potential::constant(v),
            BoundaryCondition::Dirichlet,
            constraints,
        )
        .unwrap()
    }

    #[test]
    fn linear_solution_is_exact() {
        let p = free((0.0, 1.0), 0.0, vec![]);
        let t = integrate_extended(&p, 0.0, &p.interval(), &ExtendedState::new(0.0, 1.0, vec![]), 64).unwrap();
        let n = t.len() - 1;
        assert!((t.u[n] - 1.0).abs() < 1e-10);
        assert!((t.uprime[n] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sine_solution_for_negative_constant_potential() {
        let c: f64 = 25.0;
        let p = free((0.0, 1.0), -c, vec![]);
        let sub = Interval::new(0.0, 0.7).unwrap();
        let t = integrate_extended(&p, 0.0, &sub, &ExtendedState::new(0.0, 1.0, vec![]), 2048).unwrap();
        let exact = (c.sqrt() * 0.7).sin() / c.sqrt();
        assert!((t.u[t.len() - 1] - exact).abs() < 1e-11);
    }

    #[test]
    fn cosine_with_inactive_multiplier() {
        let c: f64 = 4.0;
        let p = free((0.0, 1.0), -c, vec![ConstraintFunction::constant(1.0)]);
        let run = |steps| {
            let t = integrate_extended(&p, 0.0, &p.interval(), &ExtendedState::new(1.0, 0.0, vec![0.0]), steps).unwrap();
            t.u[t.len() - 1]
        };
        let exact = c.sqrt().cos();
        assert!((run(512) - exact).abs() < 1e-10);
        assert!((run(1024) - exact).abs() < 1e-11);
        // w(1) = ∫ cos(2x) = sin(2)/2
        let t = integrate_extended(&p, 0.0, &p.interval(), &ExtendedState::new(1.0, 0.0, vec![0.0]), 1024).unwrap();
        assert!((t.accumulators[0] - 2f64.sin() / 2.0).abs() < 1e-11);
        assert_eq!(t.multipliers, vec![0.0]);
    }

    #[test]
    fn richardson_ratio_is_fourth_order() {
        let p = SchroedingerProblem::new(
            Interval::new(0.0, 2.0).unwrap(),
            Potential::new(|x: f64| -9.0 + 3.0 * (2.0 * x).cos()),
            BoundaryCondition::Dirichlet,
            vec![],
        )
        .unwrap();
        let end = |steps| {
            let t = integrate_extended(&p, 0.0, &p.interval(), &ExtendedState::new(0.0, 1.0, vec![]), steps).unwrap();
            t.u[t.len() - 1]
        };
        let (a, b, c) = (end(64), end(128), end(256));
        let ratio = (a - b) / (b - c);
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }

    #[test]
    fn blow_up_is_reported() {
        let p = free((0.0, 1.0), 1e300, vec![]);
        let r = integrate_extended(&p, 0.0, &p.interval(), &ExtendedState::new(1.0, 0.0, vec![]), 64);
        assert!(matches!(r, Err(Error::BlowUp { .. })));
    }

    #[test]
    fn multiplier_count_checked() {
        let p = free((0.0, 1.0), 0.0, vec![ConstraintFunction::constant(1.0)]);
        let r = integrate_extended(&p, 0.0, &p.interval(), &ExtendedState::new(1.0, 0.0, vec![]), 64);
        assert!(matches!(r, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn unconstrained_basis_and_plane() {
        let p = free((0.0, 1.0), 0.0, vec![]);
        let b = constrained_basis(&p, 0.0, &p.interval(), 256).unwrap();
        assert_eq!(b.dim, 2);
        let plane = trace_plane(&b).unwrap();
        // span{(1,1,0,0), (0,1,-1,1)}
        let expected = LagrangianPlane::new(vec![
            BoundaryTrace::from_array([1.0, 1.0, 0.0, 0.0]),
            BoundaryTrace::from_array([0.0, 1.0, -1.0, 1.0]),
        ])
        .unwrap();
        for col in plane.frame() {
            // residual after projecting onto the expected plane
            let mut r = *col;
            for q in expected.frame() {
                let d: f64 = (0..4).map(|i| col[i] * q[i]).sum();
                for i in 0..4 {
                    r[i] -= d * q[i];
                }
            }
            assert!(r.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-10);
        }
    }

    #[test]
    fn benchmark_basis_spans_closed_form() {
        // V = −C, φ = 1 on (−t, t) at λ = 0: span{cos γx − sin(γt)/(γt), sin γx}
        let c: f64 = 25.0;
        let g = c.sqrt();
        let p = free((-1.0, 1.0), -c, vec![ConstraintFunction::constant(1.0)]);
        let t = 0.8;
        let sub = Interval::new(-t, t).unwrap();
        let b = constrained_basis(&p, 0.0, &sub, 4096).unwrap();
        assert_eq!(b.dim, 2);
        let even = |x: f64| (g * x).cos() - (g * t).sin() / (g * t);
        let odd = |x: f64| (g * x).sin();
        // least squares fit of each basis element onto {even, odd}
        for traj in &b.basis {
            let (mut aa, mut ab, mut bb, mut ay, mut by) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for (&x, &y) in traj.positions.iter().zip(&traj.u) {
                let (e, o) = (even(x), odd(x));
                aa += e * e;
                ab += e * o;
                bb += o * o;
                ay += e * y;
                by += o * y;
            }
            let det = aa * bb - ab * ab;
            let (ca, cb) = ((ay * bb - by * ab) / det, (by * aa - ay * ab) / det);
            let resid = traj
                .positions
                .iter()
                .zip(&traj.u)
                .map(|(&x, &y)| (y - ca * even(x) - cb * odd(x)).abs())
                .fold(0.0, f64::max);
            assert!(resid < 1e-9, "residual {resid}");
            assert!(traj.accumulators[0].abs() < 1e-10);
        }
    }

    #[test]
    fn degenerate_gamma_limit() {
        // λ = −C makes u″ = −a: span{x, x² − t²/3}
        let c = 25.0;
        let p = free((-1.0, 1.0), -c, vec![ConstraintFunction::constant(1.0)]);
        let t: f64 = 0.9;
        let sub = Interval::new(-t, t).unwrap();
        let b = constrained_basis(&p, -c, &sub, 2048).unwrap();
        assert_eq!(b.dim, 2);
        let f1 = |x: f64| x;
        let f2 = |x: f64| x * x - t * t / 3.0;
        for traj in &b.basis {
            let (mut aa, mut ab, mut bb, mut ay, mut by) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for (&x, &y) in traj.positions.iter().zip(&traj.u) {
                let (e, o) = (f1(x), f2(x));
                aa += e * e;
                ab += e * o;
                bb += o * o;
                ay += e * y;
                by += o * y;
            }
            let det = aa * bb - ab * ab;
            let (ca, cb) = ((ay * bb - by * ab) / det, (by * aa - ay * ab) / det);
            let resid = traj
                .positions
                .iter()
                .zip(&traj.u)
                .map(|(&x, &y)| (y - ca * f1(x) - cb * f2(x)).abs())
                .fold(0.0, f64::max);
            assert!(resid < 1e-10, "residual {resid}");
        }
    }

    #[test]
    fn plane_meets_dirichlet_at_eigenvalue() {
        use std::f64::consts::PI;
        let c = 25.0;
        let p = free((-1.0, 1.0), -c, vec![ConstraintFunction::constant(1.0)]);
        let lambda = PI * PI - c;
        let b = constrained_basis(&p, lambda, &p.interval(), 4096).unwrap();
        let plane = trace_plane(&b).unwrap();
        assert_eq!(intersection_dimension(&plane, BoundaryCondition::Dirichlet, 1e-8).unwrap(), 1);
        let b = constrained_basis(&p, lambda + 0.3, &p.interval(), 4096).unwrap();
        let plane = trace_plane(&b).unwrap();
        assert_eq!(intersection_dimension(&plane, BoundaryCondition::Dirichlet, 1e-8).unwrap(), 0);
    }

    #[test]
    fn isotropy_on_a_lambda_grid() {
        let c = 25.0;
        let p = free((-1.0, 1.0), -c, vec![ConstraintFunction::constant(1.0)]);
        for i in 0..10 {
            let lambda = -c - 5.0 + (c + 5.0) * i as f64 / 9.0;
            let b = constrained_basis(&p, lambda, &p.interval(), 4096).unwrap();
            let plane = trace_plane(&b).unwrap();
            assert!(plane.isotropy_defect() < 1e-8);
        }
    }

    #[test]
    fn steps_for_is_even_and_bounded_below() {
        let i = Interval::new(0.0, 0.001).unwrap();
        assert_eq!(steps_for(&i, 2048), 16);
        let i = Interval::new(-1.0, 1.0).unwrap();
        assert_eq!(steps_for(&i, 2048), 4096);
        let i = Interval::new(0.0, 1.0003).unwrap();
        assert_eq!(steps_for(&i, 1000) % 2, 0);
    }
}
