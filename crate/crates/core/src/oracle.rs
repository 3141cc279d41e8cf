//! Brute-force ground truth for the constant-potential benchmark on (−1, 1).
//!
//! With `V = −C` and the single constraint `∫u = 0`, every index the toolkit
//! computes reduces to counting roots of elementary transcendental
//! equations in `γ ∈ (0, √C)`. These counts, a dense Jacobi eigensolver and
//! composite Simpson quadrature are the references the numerical routes are
//! checked against.

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};
use crate::scalar::Real;

/// Which benchmark count to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootCountMode {
    /// Dirichlet with `∫u = 0`: `sin γ = 0` or `tan γ = γ`.
    ConstrainedDirichlet,
    /// Dirichlet, no constraint: `sin γ = 0` or `cos γ = 0`.
    UnconstrainedDirichlet,
    /// Neumann, no constraint: `sin γ = 0` or `cos γ = 0`, including `γ = 0`.
    UnconstrainedNeumann,
}

#[derive(Debug, Clone, Copy)]
pub struct RootCountQuery {
    pub c: f64,
    pub mode: RootCountMode,
}

const GUARD: f64 = 1e-9;

/// Root of `tan γ = γ` on `(kπ, kπ + π/2)`, `k ≥ 1`, by bisection.
pub fn tan_fixed_point(k: usize) -> f64 {
    use std::f64::consts::PI;
    let kf = k as f64;
    let (mut lo, mut hi) = (kf * PI + 1e-9, (kf + 0.5) * PI - 1e-9);
    let h = |g: f64| g.sin() - g * g.cos();
    // h(kπ) has sign (-1)^{k+1} kπ, h((k+1/2)π) has sign (-1)^k
    let flo = h(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Sorted roots relevant to `mode` lying in `[0, limit]` (plus one beyond).
fn benchmark_roots(mode: RootCountMode, limit: f64) -> Vec<f64> {
    use std::f64::consts::PI;
    let mut roots = Vec::new();
    let mut k = 1usize;
    loop {
        let s = k as f64 * PI;
        roots.push(s);
        match mode {
            RootCountMode::ConstrainedDirichlet => roots.push(tan_fixed_point(k)),
            RootCountMode::UnconstrainedDirichlet | RootCountMode::UnconstrainedNeumann => {
                roots.push(s - 0.5 * PI)
            }
        }
        if s - 0.5 * PI > limit + 1.0 {
            break;
        }
        k += 1;
    }
    if mode == RootCountMode::UnconstrainedNeumann {
        roots.push(0.0);
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots
}

/// Counts the benchmark roots `γ < √C` (γ ∈ (0, √C), or [0, √C) for Neumann).
pub fn count_roots(query: RootCountQuery) -> Result<usize> {
    if !(query.c > 0.0) {
        return Err(Error::InvalidArgument(format!("C = {} must be positive", query.c)));
    }
    let sqrt_c = query.c.sqrt();
    let roots = benchmark_roots(query.mode, sqrt_c);
    if let Some(&r) = roots.iter().find(|&&r| r > 0.0 && (r - sqrt_c).abs() < GUARD) {
        let shifted = r + 1e-6;
        return Err(Error::RootGuard { sqrt_c, suggested: shifted * shifted });
    }
    Ok(roots.iter().filter(|&&r| r < sqrt_c).count())
}

/// The closed-form constraint matrix entry `⟨L⁻¹1, 1⟩ = (2/γ²)(tan γ/γ − 1)`
/// on (−1, 1) with Dirichlet conditions and `V = −γ²`.
pub fn benchmark_constraint_entry(gamma: f64) -> f64 {
    2.0 / (gamma * gamma) * (gamma.tan() / gamma - 1.0)
}

/// Negative-eigenvalue count via full Jacobi diagonalisation.
pub fn dense_negative_count<T: Real>(matrix: &Matrix<T>) -> Result<usize> {
    if !matrix.is_square() {
        return Err(Error::DimensionMismatch("dense_negative_count needs a square matrix".into()));
    }
    let defect = matrix.asymmetry();
    if defect > T::lit(1e-10) * matrix.max_abs().max(T::one()) {
        return Err(Error::NotSymmetric { defect: defect.to_f64_lossy() });
    }
    let (values, _) = symmetric_eigen(matrix)?;
    Ok(values.iter().filter(|&&v| v < T::zero()).count())
}

/// Composite Simpson rule on uniformly spaced samples with spacing `h`.
pub fn quadrature<T: Real>(samples: &[T], h: T) -> Result<T> {
    let n = samples.len();
    if n < 3 || n % 2 == 0 {
        return Err(Error::QuadraturePoints(n));
    }
    let (two, four) = (T::lit(2.0), T::lit(4.0));
    let mut acc = samples[0] + samples[n - 1];
    for (i, &s) in samples.iter().enumerate().take(n - 1).skip(1) {
        acc = acc + if i % 2 == 1 { four * s } else { two * s };
    }
    Ok(acc * h / T::lit(3.0))
}

/// Simpson integral of `f` on `[a, b]` with `intervals` (rounded up to even).
pub fn integrate_fn<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, intervals: usize) -> T {
    let n = intervals.max(2) + intervals % 2;
    let h = (b - a) / T::from_usize_lossy(n);
    let samples: Vec<T> = (0..=n).map(|i| f(a + h * T::from_usize_lossy(i))).collect();
    quadrature(&samples, h).expect("odd sample count by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn tan_fixed_points_match_known_values() {
        assert!((tan_fixed_point(1) - 4.493_409_457_909_064).abs() < 1e-12);
        assert!((tan_fixed_point(2) - 7.725_251_836_937_707).abs() < 1e-12);
    }

    #[test]
    fn counts_for_c_25() {
        let q = |mode| count_roots(RootCountQuery { c: 25.0, mode }).unwrap();
        assert_eq!(q(RootCountMode::ConstrainedDirichlet), 2);
        assert_eq!(q(RootCountMode::UnconstrainedDirichlet), 3);
        // γ ∈ {0, π/2, π, 3π/2} below 5
        assert_eq!(q(RootCountMode::UnconstrainedNeumann), 4);
    }

    #[test]
    fn counts_for_c_1() {
        for mode in [RootCountMode::ConstrainedDirichlet, RootCountMode::UnconstrainedDirichlet] {
            assert_eq!(count_roots(RootCountQuery { c: 1.0, mode }).unwrap(), 0);
        }
    }

    #[test]
    fn guard_trips_at_a_root() {
        let err = count_roots(RootCountQuery { c: PI * PI, mode: RootCountMode::ConstrainedDirichlet });
        assert!(matches!(err, Err(Error::RootGuard { .. })));
    }

    #[test]
    fn comparison_identity_on_a_grid() {
        // n(L) = n(L_c) + [tan √C <= √C]
        let mut checked = 0;
        for i in 0..50 {
            let c = 0.7 + 2.37 * i as f64;
            let s = c.sqrt();
            let lc = count_roots(RootCountQuery { c, mode: RootCountMode::ConstrainedDirichlet });
            let lu = count_roots(RootCountQuery { c, mode: RootCountMode::UnconstrainedDirichlet });
            if let (Ok(lc), Ok(lu)) = (lc, lu) {
                let bump = usize::from(s.tan() <= s);
                assert_eq!(lc + bump, lu, "C = {c}");
                checked += 1;
            }
        }
        assert_eq!(checked, 50);
    }

    #[test]
    fn dense_counts() {
        let d = Matrix::from_diagonal(&[-1.0, 2.0]);
        assert_eq!(dense_negative_count(&d).unwrap(), 1);
        let s = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(dense_negative_count(&s).unwrap(), 1);
        let bad = Matrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(dense_negative_count(&bad), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn simpson_reference_values() {
        let cube: Vec<f64> = (0..101).map(|i| (i as f64 / 100.0).powi(3)).collect();
        assert!((quadrature(&cube, 0.01).unwrap() - 0.25).abs() < 1e-10);
        let h = PI / 200.0;
        let sin2: Vec<f64> = (0..201).map(|i| (i as f64 * h).sin().powi(2)).collect();
        assert!((quadrature(&sin2, h).unwrap() - PI / 2.0).abs() < 1e-10);
        let h = 40.0 / 4000.0;
        let sech2: Vec<f64> = (0..4001).map(|i| 1.0 / (-20.0 + i as f64 * h).cosh().powi(2)).collect();
        let exact = 2.0 * 20f64.tanh();
        assert!((quadrature(&sech2, h).unwrap() - exact).abs() < 1e-8);
    }

    #[test]
    fn simpson_rejects_even_counts() {
        assert_eq!(quadrature(&[0.0, 1.0], 1.0), Err(Error::QuadraturePoints(2)));
        assert_eq!(quadrature(&[0.0, 1.0, 2.0, 3.0], 1.0), Err(Error::QuadraturePoints(4)));
    }
}
