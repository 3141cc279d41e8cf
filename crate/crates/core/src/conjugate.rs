//! Conjugate points: values of t where the constrained Dirichlet problem on
//! `Ω_t` has a nontrivial solution of `Lu = Σ aᵢφᵢ`.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{determinant, symmetric_eigen, Matrix, Svd};
use crate::model::{ConstraintFunction, CrossingKind, CrossingRecord, Interval, SchroedingerProblem, ScalarFn};
use crate::scalar::Real;
use crate::scan::{bisect, candidates, golden_min, Candidate};
use crate::shooting::{
    integrate_extended, integrate_forced, steps_for, unit_vectors, ExtendedState, Trajectory, DEFAULT_STEPS_PER_UNIT,
};

/// Default number of t-grid cells.
pub const DEFAULT_T_GRID: usize = 256;
/// Singular-value threshold for the multiplicity `d(t)`.
pub const NULLITY_TOL: f64 = 1e-8;
/// Default `t_min / t_max`.
pub const DEFAULT_T_MIN_FRACTION: f64 = 0.02;

/// An increasing family `t ↦ Ω_t = (left(t), right(t))`.
#[derive(Clone)]
pub struct DomainFamily<T> {
    left: ScalarFn<T>,
    right: ScalarFn<T>,
    left_velocity: ScalarFn<T>,
    right_velocity: ScalarFn<T>,
    t_min: T,
    t_max: T,
}

impl<T> std::fmt::Debug for DomainFamily<T>
where
    T: std::fmt::Debug,
{
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DomainFamily").field("t_min", &self.t_min).field("t_max", &self.t_max).finish()
    }
}

impl<T: Real> DomainFamily<T> {
    /// General family; checked for monotonicity on a sample grid.
    pub fn new(
        left: impl Fn(T) -> T + Send + Sync + 'static,
        right: impl Fn(T) -> T + Send + Sync + 'static,
        left_velocity: impl Fn(T) -> T + Send + Sync + 'static,
        right_velocity: impl Fn(T) -> T + Send + Sync + 'static,
        t_min: T,
        t_max: T,
    ) -> Result<Self> {
        if !(T::zero() < t_min && t_min < t_max) {
            return Err(Error::InvalidArgument(format!("need 0 < t_min < t_max, got ({t_min}, {t_max}]")));
        }
        let fam = Self {
            left: Arc::new(left),
            right: Arc::new(right),
            left_velocity: Arc::new(left_velocity),
            right_velocity: Arc::new(right_velocity),
            t_min,
            t_max,
        };
        let ts = Interval::new(t_min, t_max)?.grid(65);
        for w in ts.windows(2) {
            let (l0, r0, l1, r1) = (fam.left(w[0]), fam.right(w[0]), fam.left(w[1]), fam.right(w[1]));
            if !(l0 < r0) {
                return Err(Error::InvalidInterval { left: l0.to_f64_lossy(), right: r0.to_f64_lossy() });
            }
            if l1 > l0 || r1 < r0 || (l1 == l0 && r1 == r0) {
                return Err(Error::InvalidArgument(format!("domain family is not increasing near t = {}", w[0])));
            }
        }
        Ok(fam)
    }

    /// `Ω_t = (−t, t)`.
    pub fn symmetric(t_min: T, t_max: T) -> Result<Self> {
        Self::new(|t: T| -t, |t| t, |_| -T::one(), |_| T::one(), t_min, t_max)
    }

    /// `Ω_t = (a + b·t, c + d·t)` with `b ≤ 0 ≤ d`.
    pub fn affine(a: T, b: T, c: T, d: T, t_min: T, t_max: T) -> Result<Self> {
        Self::new(move |t| a + b * t, move |t| c + d * t, move |_| b, move |_| d, t_min, t_max)
    }

    /// Intervals shrinking about the midpoint of `interval`, equal to it at
    /// `t = 1` and scaled by `t_min_fraction` at the bottom of the range.
    pub fn centred(interval: &Interval<T>, t_min_fraction: T) -> Result<Self> {
        let (mid, half) = (interval.midpoint(), interval.length() / T::lit(2.0));
        Self::affine(mid, -half, mid, half, t_min_fraction, T::one())
    }

    pub fn left(&self, t: T) -> T {
        (self.left)(t)
    }

    pub fn right(&self, t: T) -> T {
        (self.right)(t)
    }

    pub fn left_velocity(&self, t: T) -> T {
        (self.left_velocity)(t)
    }

    pub fn right_velocity(&self, t: T) -> T {
        (self.right_velocity)(t)
    }

    pub fn t_range(&self) -> (T, T) {
        (self.t_min, self.t_max)
    }

    pub fn domain(&self, t: T) -> Result<Interval<T>> {
        Interval::new(self.left(t), self.right(t))
    }

    /// `|Ω_{t_min}| < 1e-3·|Ω_{t_max}|`.
    pub fn shrinks_to_point(&self) -> bool {
        let len = |t| self.right(t) - self.left(t);
        len(self.t_min) < T::lit(1e-3) * len(self.t_max)
    }
}

/// Constraint functions restricted to `sub`.
pub fn restricted_constraints<T: Real>(problem: &SchroedingerProblem<T>, sub: Interval<T>) -> Vec<ConstraintFunction<T>> {
    problem.constraints().iter().map(|c| c.restrict(sub)).collect()
}

/// Result of [`dirichlet_defect`].
#[derive(Debug, Clone)]
pub struct DirichletDefect<T> {
    pub t: T,
    /// Determinant of the scaled condition matrix.
    pub defect: T,
    /// Multiplicity `d(t)`.
    pub multiplicity: usize,
    /// Smallest singular value of the condition matrix, whose entries are
    /// bounded by one.
    pub sigma_min: T,
    /// Kernel solutions with `u(left) = 0`, scaled to unit sup-norm.
    pub kernel: Vec<Trajectory<T>>,
}

/// `[wᵢ(right); u(right)]` for the parameters `(u′(left), a₁…a_m)`. Columns
/// are divided by the trajectory sup-norm and the `wᵢ` rows by
/// `|Ω|·sup|φᵢ|`; a row may vanish identically, so rows are not normalised.
fn condition_matrix<T: Real>(problem: &SchroedingerProblem<T>, lambda: T, sub: &Interval<T>, steps: usize) -> Result<Matrix<T>> {
    Ok(scaled_condition_matrix(problem, lambda, sub, steps)?.0)
}

/// The matrix together with its column scales.
fn scaled_condition_matrix<T: Real>(
    problem: &SchroedingerProblem<T>,
    lambda: T,
    sub: &Interval<T>,
    steps: usize,
) -> Result<(Matrix<T>, Vec<T>)> {
    let m = problem.constraint_count();
    let forcings = restricted_constraints(problem, *sub);
    let mut c = Matrix::zeros(m + 1, m + 1);
    let mut positions = Vec::new();
    let mut scales = Vec::with_capacity(m + 1);
    for (j, e) in unit_vectors::<T>(m + 1).into_iter().enumerate() {
        let init = ExtendedState::new(T::zero(), e[0], e[1..].to_vec());
        let (end, traj) = integrate_forced(problem.potential(), &forcings, lambda, sub, &init, steps, true)?;
        let traj = traj.expect("recording requested");
        let s = traj.sup_norm().max(T::min_positive_value());
        for i in 0..m {
            c[(i, j)] = end.accumulators[i] / s;
        }
        c[(m, j)] = end.u_right / s;
        scales.push(s);
        positions = traj.positions;
    }
    for (i, f) in forcings.iter().enumerate() {
        let sup = positions.iter().fold(T::zero(), |acc, &x| acc.max(f.value(x).abs()));
        let w = sub.length() * sup.max(T::min_positive_value());
        for j in 0..=m {
            c[(i, j)] = c[(i, j)] / w;
        }
    }
    Ok((c, scales))
}

pub(crate) fn defect_at<T: Real>(problem: &SchroedingerProblem<T>, lambda: T, sub: &Interval<T>, steps: usize) -> Result<T> {
    determinant(&condition_matrix(problem, lambda, sub, steps)?)
}

fn sigma_min<T: Real>(c: &Matrix<T>) -> T {
    *Svd::new(c).singular_values.last().unwrap()
}

/// Defect, multiplicity and kernel of the constrained Dirichlet problem on
/// `Ω_t` at `λ = 0`.
pub fn dirichlet_defect<T: Real>(
    problem: &SchroedingerProblem<T>,
    t: T,
    family: &DomainFamily<T>,
    steps: usize,
) -> Result<DirichletDefect<T>> {
    let sub = family.domain(t)?;
    let sub_problem = problem.restricted(sub)?;
    let (c, scales) = scaled_condition_matrix(problem, T::zero(), &sub, steps)?;
    let defect = determinant(&c)?;
    let svd = Svd::new(&c);
    let tol = T::lit(NULLITY_TOL);
    let multiplicity = svd.singular_values.iter().filter(|&&s| s <= tol).count();
    let sigma_min = *svd.singular_values.last().unwrap();
    let mut kernel = Vec::with_capacity(multiplicity);
    for v in svd.trailing_right_vectors(multiplicity) {
        let v: Vec<T> = v.iter().zip(&scales).map(|(&x, &s)| x / s).collect();
        let init = ExtendedState::new(T::zero(), v[0], v[1..].to_vec());
        let mut traj = integrate_extended(&sub_problem, T::zero(), &sub, &init, steps)?;
        let s = traj.sup_norm();
        if s == T::zero() {
            return Err(Error::ZeroKernelVector);
        }
        for x in traj.u.iter_mut().chain(traj.uprime.iter_mut()).chain(traj.multipliers.iter_mut()) {
            *x = *x / s;
        }
        kernel.push(traj);
    }
    Ok(DirichletDefect { t, defect, multiplicity, sigma_min, kernel })
}

/// The 1D boundary crossing form `−[û′(l)²·(−l′) + û′(r)²·r′]`.
pub fn crossing_form_t<T: Real>(family: &DomainFamily<T>, t: T, kernel: &Trajectory<T>) -> T {
    crossing_form_pair(family, t, kernel, kernel)
}

fn crossing_form_pair<T: Real>(family: &DomainFamily<T>, t: T, a: &Trajectory<T>, b: &Trajectory<T>) -> T {
    let (la, ra) = (a.uprime[0], *a.uprime.last().unwrap());
    let (lb, rb) = (b.uprime[0], *b.uprime.last().unwrap());
    -(la * lb * (-family.left_velocity(t)) + ra * rb * family.right_velocity(t))
}

#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    pub grid_points: usize,
    pub steps_per_unit: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { grid_points: DEFAULT_T_GRID, steps_per_unit: DEFAULT_STEPS_PER_UNIT }
    }
}

#[derive(Debug, Clone)]
pub struct ConjugateReport<T> {
    /// Points with `t < t_max`, increasing.
    pub conjugate_points: Vec<CrossingRecord<T>>,
    pub total_count: usize,
    pub morse_index_claim: usize,
    /// Points within 1e-8 of `t_max`: recorded, not counted.
    pub endpoint_crossings: Vec<CrossingRecord<T>>,
    pub shrinks_to_point: bool,
    /// `(π/|Ω_{t_min}|)² + inf V > 0`, ruling out conjugate points below `t_min`.
    pub small_t_certificate: bool,
    /// Neither of the two conditions above: the count is a spectral flow
    /// between `t_min` and `t_max`, not an absolute index.
    pub spectral_flow_only: bool,
    /// `(t, defect)` on the scan grid.
    pub samples: Vec<(T, T)>,
}

fn record<T: Real>(family: &DomainFamily<T>, d: &DirichletDefect<T>) -> Result<CrossingRecord<T>> {
    let k = d.kernel.len();
    let mut q = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            q[(i, j)] = crossing_form_pair(family, d.t, &d.kernel[i], &d.kernel[j]);
        }
    }
    let (vals, _) = symmetric_eigen(&q)?;
    Ok(CrossingRecord::new(d.t, d.multiplicity, vals, CrossingKind::DomainSweep, T::lit(1e-10)))
}

/// Scans `t ∈ [t_min, t_max]` for conjugate points.
pub fn scan<T: Real>(problem: &SchroedingerProblem<T>, family: &DomainFamily<T>, opts: &ScanOptions) -> Result<ConjugateReport<T>> {
    if opts.grid_points < 128 {
        return Err(Error::InvalidArgument(format!("grid_points = {} < 128", opts.grid_points)));
    }
    let (t_min, t_max) = family.t_range();
    let top = family.domain(t_max)?;
    if !problem.interval().contains_interval(&top) {
        return Err(Error::InvalidArgument("family leaves the problem interval".into()));
    }
    let steps = steps_for(&top, opts.steps_per_unit);
    let g = opts.grid_points;
    let grid: Vec<T> = (0..=g)
        .map(|i| if i == g { t_max } else { t_min + (t_max - t_min) * T::from_usize_lossy(i) / T::from_usize_lossy(g) })
        .collect();
    let defect = |t: T| -> Result<T> { defect_at(problem, T::zero(), &family.domain(t)?, steps) };
    let values: Vec<T> = grid.par_iter().map(|&t| defect(t)).collect::<Result<Vec<_>>>()?;
    let tol = T::lit(1e-10);

    let mut roots = Vec::new();
    for cand in candidates(&values) {
        match cand {
            Candidate::Exact(i) => roots.push(grid[i]),
            Candidate::SignChange(i) => roots.push(bisect(defect, grid[i], values[i], grid[i + 1], tol)?),
            Candidate::Tangency(i) => {
                let (lo, hi) = (grid[i - 1], grid[i + 1]);
                let sig = |t: T| -> Result<T> {
                    Ok(sigma_min(&condition_matrix(problem, T::zero(), &family.domain(t)?, steps)?))
                };
                let (at, smin) = golden_min(sig, lo, hi, tol)?;
                if smin <= T::lit(NULLITY_TOL) {
                    roots.push(at);
                    continue;
                }
                let s = values[i].signum();
                let (_, dip) = golden_min(|t| defect(t).map(|v| s * v), lo, hi, tol)?;
                if dip < T::zero() {
                    return Err(Error::IncreaseGrid { near: grid[i].to_f64_lossy() });
                }
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    roots.dedup_by(|a, b| (*a - *b).abs() <= T::lit(10.0) * tol);

    let mut conjugate_points = Vec::new();
    let mut endpoint_crossings = Vec::new();
    for t in roots {
        let d = dirichlet_defect(problem, t, family, steps)?;
        if d.multiplicity == 0 {
            return Err(Error::SpuriousRoot { at: t.to_f64_lossy() });
        }
        let rec = record(family, &d)?;
        if (t_max - t).abs() <= T::lit(1e-8) {
            endpoint_crossings.push(rec);
        } else {
            conjugate_points.push(rec);
        }
    }
    if endpoint_crossings.is_empty() {
        let d = dirichlet_defect(problem, t_max, family, steps)?;
        if d.multiplicity > 0 {
            endpoint_crossings.push(record(family, &d)?);
        }
    }
    let total_count = conjugate_points.iter().map(|c| c.dimension).sum();
    let shrinks_to_point = family.shrinks_to_point();
    let bottom = family.domain(t_min)?;
    let (inf_v, _) = problem.potential().bounds(&bottom, 1025)?;
    let small_t_certificate = (T::PI() / bottom.length()).powi(2) + inf_v > T::zero();
    Ok(ConjugateReport {
        conjugate_points,
        total_count,
        morse_index_claim: total_count,
        endpoint_crossings,
        shrinks_to_point,
        small_t_certificate,
        spectral_flow_only: !(shrinks_to_point || small_t_certificate),
        samples: grid.into_iter().zip(values).collect(),
    })
}
