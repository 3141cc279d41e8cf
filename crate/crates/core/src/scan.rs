//! Bracketing and refinement shared by the λ- and t-sweeps.

use crate::error::Result;
use crate::scalar::Real;

/// Something worth refining between grid samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Candidate {
    /// `values[i]` is exactly zero.
    Exact(usize),
    /// Sign change between samples `i` and `i + 1`.
    SignChange(usize),
    /// `|values[i]|` is a strict local minimum without a sign change
    /// around it; a possible even-order root.
    Tangency(usize),
}

pub(crate) fn candidates<T: Real>(values: &[T]) -> Vec<Candidate> {
    let n = values.len();
    let mut out = Vec::new();
    for i in 0..n {
        let v = values[i];
        if v == T::zero() {
            out.push(Candidate::Exact(i));
            continue;
        }
        if i + 1 < n && v * values[i + 1] < T::zero() {
            out.push(Candidate::SignChange(i));
        }
        if i > 0 && i + 1 < n {
            let (a, b) = (values[i - 1], values[i + 1]);
            let same = a * v > T::zero() && b * v > T::zero();
            if same && v.abs() < a.abs() && v.abs() <= b.abs() {
                out.push(Candidate::Tangency(i));
            }
        }
    }
    out
}

/// Bisection on a bracket with `f(lo)·f(hi) < 0` until `hi − lo ≤ tol`.
pub(crate) fn bisect<T: Real>(
    f: impl Fn(T) -> Result<T>,
    mut lo: T,
    flo: T,
    mut hi: T,
    tol: T,
) -> Result<T> {
    let half = T::lit(0.5);
    let sign_lo = flo.signum();
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = half * (lo + hi);
        let fm = f(mid)?;
        if fm == T::zero() {
            return Ok(mid);
        }
        if fm.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(half * (lo + hi))
}

/// Golden-section minimisation of `f` on `[lo, hi]`; returns `(argmin, min)`.
pub(crate) fn golden_min<T: Real>(f: impl Fn(T) -> Result<T>, mut lo: T, mut hi: T, tol: T) -> Result<(T, T)> {
    let r = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}
