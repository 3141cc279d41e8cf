//! Small dense linear algebra used throughout the toolkit.
//!
//! Everything here operates on modest sizes (at most a few hundred rows), so
//! the routines favour robustness over blocking or cache tuning.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self { rows: r, cols: c, data: rows.iter().flatten().copied().collect() })
    }

    pub fn from_diagonal(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    /// Largest |a_ij - a_ji|.
    pub fn asymmetry(&self) -> T {
        let mut d = T::zero();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                d = d.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        d
    }

    /// Replaces the matrix by (A + Aᵀ)/2 and returns the defect removed.
    pub fn symmetrize(&mut self) -> T {
        let half = T::lit(0.5);
        let defect = self.asymmetry();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let avg = half * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = avg;
                self[(j, i)] = avg;
            }
        }
        defect
    }

    /// Scales every nonzero row to unit Euclidean norm. Nullity and the sign
    /// of the determinant are unchanged.
    pub fn equilibrate_rows(&mut self) {
        for i in 0..self.rows {
            let norm = self.row(i).iter().map(|&v| v * v).sum::<T>().sqrt();
            if norm > T::zero() {
                for j in 0..self.cols {
                    self[(i, j)] = self[(i, j)] / norm;
                }
            }
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Determinant by LU with partial pivoting.
pub fn determinant<T: Real>(a: &Matrix<T>) -> Result<T> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("determinant of non-square matrix".into()));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut det = T::one();
    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|i| (i, m[(i, k)].abs()))
            .fold((k, -T::one()), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pmax == T::zero() {
            return Ok(T::zero());
        }
        if p != k {
            for j in 0..n {
                let tmp = m[(k, j)];
                m[(k, j)] = m[(p, j)];
                m[(p, j)] = tmp;
            }
            det = -det;
        }
        let pivot = m[(k, k)];
        det = det * pivot;
        for i in (k + 1)..n {
            let f = m[(i, k)] / pivot;
            if f != T::zero() {
                for j in (k + 1)..n {
                    m[(i, j)] = m[(i, j)] - f * m[(k, j)];
                }
            }
        }
    }
    Ok(det)
}

/// Singular value decomposition `A V = U Σ` by one-sided Jacobi rotations.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    /// Singular values in decreasing order; `min(rows, cols)` of them are
    /// meaningful, the remaining `cols - rows` (wide input) are zero.
    pub singular_values: Vec<T>,
    /// Right singular vectors as columns, ordered like `singular_values`.
    pub v: Matrix<T>,
}

impl<T: Real> Svd<T> {
    pub fn new(a: &Matrix<T>) -> Self {
        let (m, n) = (a.rows(), a.cols());
        let mut u = a.clone();
        let mut v = Matrix::identity(n);
        let eps = T::epsilon();
        for _sweep in 0..80 {
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                    for i in 0..m {
                        let (up, uq) = (u[(i, p)], u[(i, q)]);
                        alpha = alpha + up * up;
                        beta = beta + uq * uq;
                        gamma = gamma + up * uq;
                    }
                    if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                    let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = c * t;
                    for i in 0..m {
                        let (up, uq) = (u[(i, p)], u[(i, q)]);
                        u[(i, p)] = c * up - s * uq;
                        u[(i, q)] = s * up + c * uq;
                    }
                    for i in 0..n {
                        let (vp, vq) = (v[(i, p)], v[(i, q)]);
                        v[(i, p)] = c * vp - s * vq;
                        v[(i, q)] = s * vp + c * vq;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let mut order: Vec<(usize, T)> = (0..n)
            .map(|j| (j, (0..m).map(|i| u[(i, j)] * u[(i, j)]).sum::<T>().sqrt()))
            .collect();
        order.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
        let mut vs = Matrix::zeros(n, n);
        for (new_j, &(old_j, _)) in order.iter().enumerate() {
            for i in 0..n {
                vs[(i, new_j)] = v[(i, old_j)];
            }
        }
        Self { singular_values: order.into_iter().map(|(_, s)| s).collect(), v: vs }
    }

    pub fn largest(&self) -> T {
        self.singular_values.first().copied().unwrap_or_else(T::zero)
    }

    /// Number of singular values at or above `rel_tol * reference`.
    pub fn rank(&self, rel_tol: T, reference: T) -> usize {
        self.singular_values.iter().filter(|&&s| s >= rel_tol * reference && s > T::zero()).count()
    }

    /// Right singular vectors belonging to the `count` smallest singular values.
    pub fn trailing_right_vectors(&self, count: usize) -> Vec<Vec<T>> {
        let n = self.v.cols();
        (n - count..n).map(|j| self.v.column(j)).collect()
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Iterates until the off-diagonal Frobenius norm falls below
/// `1e-12 * ||A||_F`. Returns eigenvalues in ascending order with the
/// matching eigenvectors as columns.
pub fn symmetric_eigen<T: Real>(a: &Matrix<T>) -> Result<(Vec<T>, Matrix<T>)> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("eigen of non-square matrix".into()));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let scale = a.frobenius_norm();
    let target = T::lit(1e-12) * scale;
    let off = |m: &Matrix<T>| {
        let mut s = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                s = s + m[(i, j)] * m[(i, j)];
            }
        }
        (s + s).sqrt()
    };
    for _sweep in 0..100 {
        if off(&m) <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (T::one() + theta * theta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap_or(std::cmp::Ordering::Equal));
    let values = idx.iter().map(|&i| m[(i, i)]).collect();
    let mut vecs = Matrix::zeros(n, n);
    for (new_j, &old_j) in idx.iter().enumerate() {
        for k in 0..n {
            vecs[(k, new_j)] = v[(k, old_j)];
        }
    }
    Ok((values, vecs))
}

/// Householder reflectors triangularising a tall `n × m` matrix.
#[derive(Debug, Clone)]
pub struct Householder<T> {
    /// Unit reflector vectors; reflector `k` acts on indices `k..n`.
    vectors: Vec<Vec<T>>,
    /// Diagonal of the triangular factor.
    pub r_diagonal: Vec<T>,
}

impl<T: Real> Householder<T> {
    /// Factorises the columns `cols` (each of length `n`).
    pub fn new(cols: &[Vec<T>]) -> Self {
        let mut work: Vec<Vec<T>> = cols.to_vec();
        let n = work.first().map_or(0, Vec::len);
        let mut vectors = Vec::with_capacity(work.len());
        let mut r_diagonal = Vec::with_capacity(work.len());
        for k in 0..work.len() {
            let x = &work[k][k..n];
            let norm = x.iter().map(|&v| v * v).sum::<T>().sqrt();
            let alpha = if x[0] >= T::zero() { -norm } else { norm };
            let mut v: Vec<T> = x.to_vec();
            v[0] = v[0] - alpha;
            let vnorm = v.iter().map(|&a| a * a).sum::<T>().sqrt();
            if vnorm > T::zero() {
                for a in &mut v {
                    *a = *a / vnorm;
                }
            }
            r_diagonal.push(alpha);
            for col in work.iter_mut().skip(k) {
                let dot: T = v.iter().zip(&col[k..n]).map(|(&a, &b)| a * b).sum();
                for (i, &vi) in v.iter().enumerate() {
                    col[k + i] = col[k + i] - (dot + dot) * vi;
                }
            }
            vectors.push(v);
        }
        Self { vectors, r_diagonal }
    }

    /// Computes `Qᵀ A Q` for symmetric `A`, where `Q = H₁⋯H_m`.
    pub fn congruence(&self, a: &Matrix<T>) -> Matrix<T> {
        let n = a.rows();
        let mut m = a.clone();
        for (k, v) in self.vectors.iter().enumerate() {
            // rows: M <- H M
            for j in 0..n {
                let dot: T = v.iter().enumerate().map(|(i, &vi)| vi * m[(k + i, j)]).sum();
                for (i, &vi) in v.iter().enumerate() {
                    m[(k + i, j)] = m[(k + i, j)] - (dot + dot) * vi;
                }
            }
            // columns: M <- M H
            for i in 0..n {
                let dot: T = v.iter().enumerate().map(|(j, &vj)| vj * m[(i, k + j)]).sum();
                for (j, &vj) in v.iter().enumerate() {
                    m[(i, k + j)] = m[(i, k + j)] - (dot + dot) * vj;
                }
            }
        }
        m
    }
}

/// Inertia of a symmetric matrix: counts of negative, zero and positive
/// eigenvalues, read off the pivots of a factorisation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Inertia {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

/// Outcome of a pivoted factorisation: inertia plus the smallest pivot
/// magnitude relative to the matrix scale.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Factored<T> {
    pub inertia: Inertia,
    pub min_pivot: T,
}

/// Signed-pivot LDLᵀ recurrence for a symmetric tridiagonal matrix.
pub(crate) fn tridiagonal_ldlt<T: Real>(diag: &[T], off: &[T]) -> Factored<T> {
    let mut inertia = Inertia::default();
    let mut min_pivot = T::infinity();
    let mut prev = T::one();
    let mut prev_off2 = T::zero();
    for (i, &d) in diag.iter().enumerate() {
        let pivot = if i == 0 { d } else { d - prev_off2 / prev };
        min_pivot = min_pivot.min(pivot.abs());
        if pivot < T::zero() {
            inertia.negative += 1;
        } else if pivot > T::zero() {
            inertia.positive += 1;
        } else {
            inertia.zero += 1;
        }
        prev = pivot;
        prev_off2 = off.get(i).map_or(T::zero(), |&e| e * e);
    }
    Factored { inertia, min_pivot }
}

/// Bunch–Kaufman symmetric indefinite factorisation `P A Pᵀ = L D Lᵀ` with
/// 1×1 and 2×2 pivots. Only the inertia of `D` is kept.
pub(crate) fn bunch_kaufman<T: Real>(a: &Matrix<T>) -> Factored<T> {
    let n = a.rows();
    let mut m = a.clone();
    let alpha = (T::one() + T::lit(17.0).sqrt()) / T::lit(8.0);
    let mut inertia = Inertia::default();
    let mut min_pivot = T::infinity();
    let swap = |m: &mut Matrix<T>, p: usize, q: usize| {
        if p == q {
            return;
        }
        for j in 0..n {
            let t = m[(p, j)];
            m[(p, j)] = m[(q, j)];
            m[(q, j)] = t;
        }
        for i in 0..n {
            let t = m[(i, p)];
            m[(i, p)] = m[(i, q)];
            m[(i, q)] = t;
        }
    };
    let mut k = 0;
    while k < n {
        let akk = m[(k, k)].abs();
        let (r, colmax) = ((k + 1)..n)
            .map(|i| (i, m[(i, k)].abs()))
            .fold((k, T::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
        if akk.max(colmax) == T::zero() {
            inertia.zero += 1;
            min_pivot = T::zero();
            k += 1;
            continue;
        }
        let mut two_by_two = false;
        if akk < alpha * colmax {
            let rowmax = (k..n)
                .filter(|&j| j != r)
                .map(|j| m[(r, j)].abs())
                .fold(T::zero(), T::max);
            if akk * rowmax >= alpha * colmax * colmax {
                // 1x1 pivot at k, no interchange
            } else if m[(r, r)].abs() >= alpha * rowmax {
                swap(&mut m, k, r);
            } else {
                swap(&mut m, k + 1, r);
                two_by_two = true;
            }
        }
        if !two_by_two {
            let d = m[(k, k)];
            min_pivot = min_pivot.min(d.abs());
            if d < T::zero() {
                inertia.negative += 1;
            } else {
                inertia.positive += 1;
            }
            for i in (k + 1)..n {
                let f = m[(i, k)] / d;
                if f == T::zero() {
                    continue;
                }
                for j in (k + 1)..n {
                    m[(i, j)] = m[(i, j)] - f * m[(k, j)];
                }
            }
            k += 1;
        } else {
            let (e11, e21, e22) = (m[(k, k)], m[(k + 1, k)], m[(k + 1, k + 1)]);
            let det = e11 * e22 - e21 * e21;
            // eigenvalues of the block have signs determined by det and trace
            let block_scale = e11.abs().max(e21.abs()).max(e22.abs());
            min_pivot = min_pivot.min(det.abs() / block_scale);
            if det < T::zero() {
                inertia.negative += 1;
                inertia.positive += 1;
            } else if e11 + e22 < T::zero() {
                inertia.negative += 2;
            } else {
                inertia.positive += 2;
            }
            for i in (k + 2)..n {
                let (ai1, ai2) = (m[(i, k)], m[(i, k + 1)]);
                // row of L = [ai1 ai2] E^{-1}
                let l1 = (ai1 * e22 - ai2 * e21) / det;
                let l2 = (ai2 * e11 - ai1 * e21) / det;
                for j in (k + 2)..n {
                    m[(i, j)] = m[(i, j)] - l1 * m[(k, j)] - l2 * m[(k + 1, j)];
                }
            }
            k += 2;
        }
    }
    Factored { inertia, min_pivot }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_of_permutation_and_diagonal() {
        let a = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(determinant(&a).unwrap(), -1.0);
        let d = Matrix::<f64>::from_diagonal(&[2.0, 3.0, -1.0]);
        assert!((determinant(&d).unwrap() + 6.0).abs() < 1e-14);
    }

    #[test]
    fn svd_of_wide_matrix_has_null_space() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0, 3.0]]).unwrap();
        let svd = Svd::new(&a);
        assert!((svd.largest() - 14f64.sqrt()).abs() < 1e-12);
        assert_eq!(svd.rank(1e-10, svd.largest()), 1);
        for v in svd.trailing_right_vectors(2) {
            let r: f64 = a.mul_vec(&v)[0];
            assert!(r.abs() < 1e-12);
        }
    }

    #[test]
    fn jacobi_eigen_of_2x2() {
        let a = Matrix::<f64>::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let (vals, _) = symmetric_eigen(&a).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn householder_congruence_preserves_spectrum() {
        let a = Matrix::<f64>::from_rows(&[
            vec![4.0, 1.0, 0.5],
            vec![1.0, -3.0, 2.0],
            vec![0.5, 2.0, 1.0],
        ])
        .unwrap();
        let h = Householder::new(&[vec![1.0, 1.0, 1.0]]);
        let b = h.congruence(&a);
        let (va, _) = symmetric_eigen(&a).unwrap();
        let (vb, _) = symmetric_eigen(&b).unwrap();
        for (x, y) in va.iter().zip(&vb) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn bunch_kaufman_needs_two_by_two_pivot() {
        let a = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let f = bunch_kaufman(&a);
        assert_eq!(f.inertia, Inertia { negative: 1, zero: 0, positive: 1 });
    }

    #[test]
    fn tridiagonal_recurrence_counts_negatives() {
        let f = tridiagonal_ldlt(&[1.0, 3.0], &[-1.0]);
        assert_eq!(f.inertia.negative, 0);
        let f = tridiagonal_ldlt(&[-2.0, -1.0, 3.0], &[0.0, 0.0]);
        assert_eq!(f.inertia.negative, 2);
    }
}
